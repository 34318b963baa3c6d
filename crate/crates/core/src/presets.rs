//! Built-in root data.

use crate::error::{Error, Result};
use crate::lattice::RootDatum;

fn unit(n: usize, i: usize) -> Vec<i64> {
    let mut v = vec![0; n];
    v[i] = 1;
    v
}

fn gl(n: usize) -> Result<RootDatum> {
    let simple: Vec<Vec<i64>> = (0..n - 1)
        .map(|i| {
            let mut v = unit(n, i);
            v[i + 1] = -1;
            v
        })
        .collect();
    RootDatum::new(format!("GL{n}"), n, simple.clone(), simple)
}

/// Names accepted by [`preset`].
pub fn names() -> Vec<String> {
    let mut out: Vec<String> = ["SL2", "PGL2", "GL2", "SL3", "Sp4"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    out.extend((1..=4).map(|n| format!("GL{n}")).filter(|s| s != "GL2"));
    out.extend((1..=4).map(|n| format!("Gm{n}")));
    out
}

pub fn preset(name: &str) -> Result<RootDatum> {
    match name {
        "SL2" => RootDatum::new("SL2", 1, vec![vec![2]], vec![vec![1]]),
        "PGL2" => RootDatum::new("PGL2", 1, vec![vec![1]], vec![vec![2]]),
        "SL3" => RootDatum::new("SL3", 2, vec![vec![2, -1], vec![-1, 2]], vec![unit(2, 0), unit(2, 1)]),
        "Sp4" => RootDatum::new("Sp4", 2, vec![vec![2, -1], vec![-2, 2]], vec![unit(2, 0), unit(2, 1)]),
        _ => {
            let sized = |prefix: &str| {
                name.strip_prefix(prefix)
                    .and_then(|k| k.parse::<usize>().ok())
                    .filter(|k| (1..=4).contains(k))
            };
            if let Some(n) = sized("GL") {
                gl(n)
            } else if let Some(n) = sized("Gm") {
                RootDatum::new(format!("Gm{n}"), n, vec![], vec![])
            } else {
                Err(Error::parse(
                    name,
                    format!("unknown preset; known: {}", names().join(", ")),
                ))
            }
        }
    }
}
