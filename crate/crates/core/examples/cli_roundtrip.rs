//! Generating a problem file and running it in process.

use forge::cli::{generate, load, parse, run, GenerateOptions, RunOptions};

fn main() -> forge::Result<()> {
    let opts = GenerateOptions {
        seed: 5,
        count: 3,
        max_dim: 3,
        p: Some(3),
    };
    let file = generate("random-artinian", &opts)?;
    let text = serde_json::to_string_pretty(&file).expect("problem serializes");
    let problem = load(&parse(&text)?)?;
    let report = run(
        &problem,
        &RunOptions {
            seed: 5,
            strict: true,
            timing: false,
        },
    );
    print!("{}", report.render());
    println!("exit code {}", report.exit_code());
    Ok(())
}
