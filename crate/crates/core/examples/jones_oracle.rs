// Exact Jones values of three-strand braid closures at t = e^{2πi/5}, from
// the Fibonacci representation.

use dqc1bench::knots::{braid_matrix, jones_oracle, writhe, BlockPair, BraidWord};
use dqc1bench::Complex64;

fn run() -> dqc1bench::Result<Vec<(BraidWord, i64, Complex64)>> {
    let mut words: Vec<BraidWord> = ["id", "S12", "S12^2", "S12^3", "S12 S23", "S12 S23inv", "S12^2 S23^2"]
        .iter()
        .map(|s| s.parse())
        .collect::<dqc1bench::Result<_>>()?;
    words.push(BraidWord::power(dqc1bench::knots::Generator::S23, 3));
    Ok(words
        .into_iter()
        .map(|w| (w.clone(), writhe(&w), jones_oracle(&w)))
        .collect())
}

fn main() -> dqc1bench::Result<()> {
    for (w, wr, v) in run()? {
        let blocks = BlockPair::of(&braid_matrix(&w));
        println!(
            "{:<14} writhe {wr:+}  V = {:+.4} {:+.4}i   Tr upper = {:.3}",
            w.to_string(),
            v.re,
            v.im,
            blocks.upper.trace()
        );
    }
    Ok(())
}
