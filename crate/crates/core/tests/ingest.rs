use moneygas::error::{Error, Location};
use moneygas::ingest::{
    load_sample_batch, parse_ccdf, parse_country_panel, parse_country_panel_years, parse_samples, with_file,
    write_ccdf, write_country_panel, write_samples, DatasetKind, PanelYear,
};
use moneygas::{build_ccdf, CountryRecord, MoneySample};
use proptest::prelude::*;

fn location(e: Error) -> Location {
    match e {
        Error::Parse { location, .. } => location,
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn samples_examples() {
    let s: MoneySample<f64> = parse_samples("income\n1.0\n2.5\n", "USD").unwrap();
    assert_eq!(s.values(), &[1.0, 2.5]);
    assert_eq!(s.unit_label, "USD");
    assert_eq!(location(parse_samples::<f64>("-1\n", "USD").unwrap_err()).line, 1);
    let loc = location(parse_samples::<f64>("income\n1\n2\nabc\n", "USD").unwrap_err());
    assert_eq!((loc.line, loc.column), (4, Some(1)));
}

#[test]
fn locale_forms_are_rejected() {
    for bad in ["1,5\n", "1.000,5\n", "1 000\n", "inf\n", "NaN\n", "1e999\n", "0x10\n", "١٢\n"] {
        assert!(parse_samples::<f64>(bad, "USD").is_err(), "{bad:?} accepted");
    }
    let s: MoneySample<f64> = parse_samples("1.5e3\n.5\n+2\n", "USD").unwrap();
    assert_eq!(s.values(), &[1500.0, 0.5, 2.0]);
}

#[test]
fn ccdf_examples() {
    let c = parse_ccdf::<f64>("r,c\n1,1.0\n2,0.5\n").unwrap();
    assert_eq!(c.points(), &[(1.0, 1.0), (2.0, 0.5)]);

    let e = parse_ccdf::<f64>("r,c\n1,0.5\n2,0.4\n3,0.6\n").unwrap_err();
    let loc = location(e);
    assert_eq!((loc.line, loc.column), (4, Some(2)));

    let e = parse_ccdf::<f64>("r,c\n1,1.2\n").unwrap_err();
    assert_eq!(location(e).line, 2);

    let e = parse_ccdf::<f64>("r,c\n1,0.9\n1,0.5\n").unwrap_err();
    assert_eq!(location(e).line, 3);
}

#[test]
fn panel_examples() {
    let text = "code,population,quantity\nA,1000,2000\nB,1000,6000\n";
    let year = parse_country_panel::<f64>(text, 2005).unwrap();
    let per_capita: Vec<f64> = year.records.iter().map(|r| r.per_capita).collect();
    assert_eq!(per_capita, vec![2.0, 6.0]);
    assert_eq!(year.year, 2005);

    let dup = "code,population,quantity\nA,1,2\nA,3,4\n";
    assert!(matches!(parse_country_panel::<f64>(dup, 2000), Err(Error::DuplicateCode { .. })));
}

#[test]
fn multi_year_panel_is_split_and_sorted() {
    let text = "year,code,population,quantity\n2001,A,1,2\n1999,A,1,1\n2001,B,2,2\n1999,B,2,8\n2000,A,1,1\n2000,B,1,1\n";
    let years = parse_country_panel_years::<f64>(text).unwrap();
    let order: Vec<i32> = years.iter().map(|y| y.year).collect();
    assert_eq!(order, vec![1999, 2000, 2001]);
    assert!(years.iter().all(|y| y.records.len() == 2));

    let one = parse_country_panel::<f64>(text, 2000).unwrap();
    assert_eq!(one.records.len(), 2);
    // The same code may appear once per year.
    assert!(parse_country_panel_years::<f64>("year,code,population,quantity\n2000,A,1,1\n2000,A,1,1\n").is_err());
}

#[test]
fn zero_population_rows_are_listed_not_kept() {
    let text = "code,population,quantity\nA,0,5\nB,10,5\nC,0,0\n";
    let year = parse_country_panel::<f64>(text, 1990).unwrap();
    assert_eq!(year.records.len(), 1);
    assert_eq!(year.rejected, vec!["A".to_string(), "C".to_string()]);
}

#[test]
fn panel_header_is_required() {
    let e = parse_country_panel::<f64>("A,1,2\nB,1,2\n", 2000).unwrap_err();
    assert!(e.to_string().contains("header lacks"), "{e}");
    assert!(parse_country_panel_years::<f64>("code,population,quantity\nA,1,2\n").is_err());
}

#[test]
fn errors_name_the_file() {
    let e = with_file(parse_samples::<f64>("1\n-2\n", "USD"), "US_2018.csv").unwrap_err();
    assert_eq!(e.to_string(), "US_2018.csv:line 2, column 1: negative amount -2");
}

#[test]
fn batch_of_country_year_files() {
    let dir = tempfile::tempdir().unwrap();
    for (name, body) in [("US_2018.csv", "income\n1\n2\n3\n"), ("FR_2010.csv", "4\n5\n"), ("notes.txt", "x"), ("README.csv", "1\n")] {
        std::fs::write(dir.path().join(name), body).unwrap();
    }
    let batch = load_sample_batch::<f64>(dir.path(), "USD").unwrap();
    assert_eq!(batch.len(), 2);
    let (m, s) = &batch[0];
    assert_eq!((m.source.as_str(), m.year, m.rows, m.kind), ("FR", Some(2010), 2, DatasetKind::Samples));
    assert_eq!(s.values(), &[4.0, 5.0]);
    assert_eq!(batch[1].0.rows, 3);

    std::fs::write(dir.path().join("DE_2011.csv"), "1\n-1\n").unwrap();
    let e = load_sample_batch::<f64>(dir.path(), "USD").unwrap_err();
    assert!(e.to_string().starts_with("DE_2011.csv:line 2"), "{e}");
}

#[test]
fn batch_of_many_countries() {
    let dir = tempfile::tempdir().unwrap();
    for k in 0..67 {
        std::fs::write(dir.path().join(format!("C{k:02}_2010.csv")), format!("income\n{}\n{}\n", k + 1, 2 * k + 1)).unwrap();
    }
    let batch = load_sample_batch::<f64>(dir.path(), "PPP").unwrap();
    assert_eq!(batch.len(), 67);
    assert!(batch.iter().all(|(m, _)| m.rows == 2 && m.unit == "PPP"));
}

fn code() -> impl Strategy<Value = String> {
    "[A-Z]{3}"
}

proptest! {
    #[test]
    fn samples_round_trip(values in prop::collection::vec(0.0f64..1e12, 1..100)) {
        let s = MoneySample::new(values, "USD").unwrap();
        let back: MoneySample<f64> = parse_samples(&write_samples(&s), "USD").unwrap();
        prop_assert_eq!(back, s);
    }

    #[test]
    fn ccdf_round_trip(values in prop::collection::vec(0.0f64..1e6, 1..100)) {
        let c = build_ccdf(&MoneySample::new(values, "USD").unwrap()).unwrap();
        let back = parse_ccdf::<f64>(&write_ccdf(&c)).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn panel_round_trip(
        rows in prop::collection::btree_map((1990i32..1995, code()), (1e-3f64..1e9, 0.0f64..1e12), 1..40)
    ) {
        let mut years: Vec<PanelYear<f64>> = Vec::new();
        for ((year, code), (pop, qty)) in rows {
            if years.last().map(|y| y.year) != Some(year) {
                years.push(PanelYear { year, records: Vec::new(), rejected: Vec::new() });
            }
            years.last_mut().unwrap().records.push(CountryRecord::new(code, pop, qty).unwrap());
        }
        let back = parse_country_panel_years::<f64>(&write_country_panel(&years)).unwrap();
        prop_assert_eq!(back, years);
    }
}
