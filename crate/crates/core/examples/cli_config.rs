//! Drive the config-based runner from code and print the resulting tables.

use pibreak::cli::{compute, parse_config, Command};

const CONFIG: &str = r#"
[ensemble]
n_half = 3
phi_a = 2.0

[btc]
omega_x = 1.5
kappa = 1.0
j_xx = 0.1

[decompose]
n_half = 8
phi_a_steps = 4
"#;

fn main() -> pibreak::Result<()> {
    let cfg = parse_config(CONFIG)?;
    for command in [Command::Decompose, Command::Spectrum] {
        let (tables, summary) = compute(command, &cfg)?;
        println!("== {} {summary}", command.name());
        for t in tables.iter().filter(|t| t.rows.len() < 40) {
            print!(
                "-- {}.csv\n{}",
                t.name,
                String::from_utf8_lossy(&t.to_csv()?)
            );
        }
    }
    match parse_config("[btc]\nomega_x = 1.0\nkapa = 1.0\n") {
        Err(e) => println!("\nrejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
