//! Build joint-decoding rate regions and query them.
//!
//! Run with `cargo run --example rate_regions`.

use std::fmt::Write;

use icregime::model::{GaussianIC, RateVector};
use icregime::regions::{membership, region_full, slice, sum_capacity, support, vertices};

pub fn run_example() -> String {
    let mut out = String::new();

    let two = GaussianIC::with_unit_powers(vec![vec![1.0; 2]; 2]).expect("standard form");
    let region = region_full(&two).expect("region");
    write!(out, "{region}").unwrap();
    for v in vertices(&region).expect("K = 2") {
        writeln!(out, "vertex ({:.6}, {:.6})", v.rates()[0], v.rates()[1]).unwrap();
    }
    let s = support(&region, &[2.0, 1.0]).expect("direction");
    writeln!(out, "support along (2, 1): {s:.6}").unwrap();

    let three = GaussianIC::with_unit_powers(vec![vec![1.0; 3]; 3]).expect("standard form");
    let region3 = region_full(&three).expect("region");
    writeln!(out, "sum capacity, K = 3: {:.6}", sum_capacity(&three).expect("region")).unwrap();
    let inside = membership(&region3, &RateVector::new(vec![0.3, 0.3, 0.3]).expect("rates")).expect("K = 3");
    let outside = membership(&region3, &RateVector::new(vec![0.5, 0.5, 0.0]).expect("rates")).expect("K = 3");
    writeln!(out, "(0.3, 0.3, 0.3) inside: {}", inside.inside).unwrap();
    writeln!(out, "(0.5, 0.5, 0) inside: {}, violated {:?}", outside.inside, outside.violated).unwrap();

    let poly = slice(&region3, &[(2, 0.25)]).expect("one fixed coordinate");
    writeln!(out, "slice at R3 = 0.25 has {} corners", poly.len()).unwrap();
    for p in poly {
        writeln!(out, "  ({:.6}, {:.6})", p[0], p[1]).unwrap();
    }
    writeln!(out, "json: {}", serde_json::to_string(&region).expect("serializable")).unwrap();
    out
}

#[allow(dead_code)]
fn main() {
    print!("{}", run_example());
}
