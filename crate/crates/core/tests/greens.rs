use erwd::greens::{greens_power_integral, greens_power_series, GreensTable, DEFAULT_STEPS};
use erwd::par::Execution;
use erwd::Error;

#[test]
fn methods_agree_for_dimensions_seven_to_twelve() {
    for d in 7..=12 {
        for n in 1..=3 {
            let a = greens_power_integral(d, n).unwrap();
            let s = greens_power_series(d, n, DEFAULT_STEPS).unwrap();
            assert!((a.value - s.estimate).abs() <= 1e-6, "d={d} n={n}: {} vs {}", a.value, s.estimate);
            assert!(s.value_lower <= a.value + 1e-12 && a.value <= s.value_lower + s.tail_bound + 1e-12, "d={d} n={n}");
        }
    }
}

#[test]
fn below_published_bounds() {
    let published = GreensTable::published();
    for row in published.rows() {
        let v = greens_power_integral(row.d, row.n).unwrap().value;
        assert!(v <= row.value + 1e-6, "G_{}^*{} = {v} > {}", row.d, row.n, row.value);
        assert!(row.value - v < 1e-5, "published value should be a close rounding up");
    }
}

#[test]
fn monotone_in_dimension_and_power() {
    let table = GreensTable::compute(&(3..=16).flat_map(|d| (1..=3).map(move |n| (d, n))).filter(|&(d, n)| d > 2 * n).collect::<Vec<_>>(), Execution::Parallel).unwrap();
    for row in table.rows() {
        if let Some(next) = table.entry(row.d + 1, row.n) {
            assert!(next.value < row.value, "not decreasing in d at {:?}", row);
        }
        if let Some(higher) = table.entry(row.d, row.n + 1) {
            assert!(higher.value > row.value, "not increasing in n at {:?}", row);
        }
        assert!(row.value > 1.0);
    }
}

#[test]
fn divergence_boundary() {
    assert!(matches!(greens_power_integral(6, 3), Err(Error::Divergent(_))));
    assert!(matches!(greens_power_series(4, 2, 1000), Err(Error::Divergent(_))));
    assert!(greens_power_integral(7, 3).is_ok());
}
