use atto::verify::{report, Suite, Tolerances};
fn main() {
    let tols = Tolerances::default();
    let mut ok = true;
    for seed in [1u64, 2, 3, 5, 7, 8, 11, 13, 42, 99, 123, 555, 777, 2026, 4096, 31337, 55555, 90210, 123456, 424242] {
        for degree_max in [2usize, 3, 5] {
            let rep = report(Suite::All, seed, degree_max, &tols);
            for t in rep.tasks.iter().filter(|t| t.status == atto::verify::Status::Fail) {
                ok = false;
                println!("seed {seed} deg {degree_max}: {} {:?}", t.task_id, t.residuals);
            }
        }
    }
    println!("clean: {ok}");
}
