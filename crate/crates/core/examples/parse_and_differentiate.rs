//! Parse an expression, print its tree and derivatives, and tabulate an
//! antiderivative.

use knotbend::expr::parse;

fn main() {
    let src = std::env::args().nth(1).unwrap_or_else(|| "sin(u)^2 + 2*cos(2*u)".to_string());
    let e = match parse(&src) {
        Ok(e) => e,
        Err(err) => {
            eprintln!("{src}\n{}^ {err}", " ".repeat(err.offset));
            std::process::exit(2);
        }
    };
    println!("tree:  {}", e.to_sexpr());
    for (k, d) in e.derivatives(3).iter().enumerate() {
        println!("d{k}/du{k} = {d}");
        println!("        at u=1: {:.12}", d.evaluate(1.0).unwrap());
    }

    // F(u) = ∫_0^u e du on a 64-point grid over [0, 2π]
    let table = e.antiderivative_table(2.0 * std::f64::consts::PI, 64, 0.0).unwrap();
    println!("integral over [0, 2pi] = {:.12}", table.last().unwrap());
}
