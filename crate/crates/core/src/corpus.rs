//! Named reference functions, defined as closures so that they do not depend
//! on the expression parser.

use crate::func::Fn2D;

pub const NAMES: [&str; 5] = ["xy", "sumsq", "expsum", "absdist", "const1"];

/// The function registered under `name` together with its textual form.
pub fn named(name: &str) -> Option<(&'static str, Fn2D)> {
    let entry = match name {
        "xy" => ("x*y", Fn2D::new(|x, y| x * y)),
        "sumsq" => ("x^2+y^2", Fn2D::new(|x, y| x * x + y * y).with_positive(true)),
        "expsum" => ("exp(x+y)", Fn2D::new(|x, y| (x + y).exp()).with_positive(true)),
        "absdist" => (
            "abs(x-0.5)+abs(y-0.5)",
            Fn2D::new(|x, y| (x - 0.5).abs() + (y - 0.5).abs()).with_positive(true),
        ),
        "const1" => ("1", Fn2D::new(|_, _| 1.0).with_positive(true)),
        _ => return None,
    };
    Some(entry)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr;

    #[test]
    fn closures_agree_with_their_expressions() {
        for name in NAMES {
            let (text, f) = named(name).unwrap();
            let e = expr::parse(text).unwrap();
            for (x, y) in [(0.0, 0.0), (0.25, 0.8), (1.0, 1.0), (-1.5, 2.0)] {
                let a = f.eval(x, y).unwrap();
                let b = e.eval(x, y).unwrap();
                assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0), "{name}");
            }
        }
        assert!(named("nope").is_none());
    }
}
