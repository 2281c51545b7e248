use etstir::output::{series_csv, sweep_csv};
use etstir::plot::{render_svg, sweep_curves};
use etstir::run_sweep;
use etstir_core::driver::{run_case, SweepAxis};
use etstir_core::CaseConfig;

fn tiny() -> CaseConfig {
    let mut c = CaseConfig::default();
    c.grid.nx = 128;
    c.grid.ny = 64;
    c.drive.v_rms = 0.0;
    c.run.t_max = 4.0;
    c
}

#[test]
fn sweep_rows_follow_input_order_and_match_single_runs() {
    let base = tiny();
    let values = [1e-6, 0.0];
    let table = run_sweep(&base, SweepAxis::Voltage, &values, 2).unwrap();
    assert_eq!(table.rows.len(), 2);
    for (row, v) in table.rows.iter().zip(values) {
        assert_eq!(row.value, v);
        let alone = run_case(&SweepAxis::Voltage.apply(&base, v)).unwrap();
        assert_eq!(row.outcome.as_ref().unwrap(), &alone);
    }

    let csv = sweep_csv(&table, base.drive.v_rms);
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("1e-6,"));

    let svg = render_svg(&sweep_curves(&table), "t").unwrap();
    assert_eq!(svg.matches("<polyline").count(), 2);
    assert_eq!(svg, render_svg(&sweep_curves(&table), "t").unwrap());
    let series = series_csv(&table.rows[0].outcome.as_ref().unwrap().series);
    assert!(series.lines().skip(1).all(|l| l.contains('e')));
}

#[test]
fn failing_row_does_not_stop_the_sweep() {
    let base = tiny();
    // A gap this wide pushes the electrodes off the channel floor.
    let table = run_sweep(&base, SweepAxis::Gap, &[15e-6, 900e-6], 1).unwrap();
    assert!(table.rows[0].outcome.is_ok());
    assert!(table.rows[1].outcome.is_err());
    assert_eq!(table.failures(), 1);
    let csv = sweep_csv(&table, 0.0);
    assert!(csv.starts_with("gap_m,voltage_V,"));
    assert!(csv.lines().nth(2).unwrap().contains("error:"));
}

#[test]
fn empty_sweep_is_rejected() {
    assert!(run_sweep(&tiny(), SweepAxis::Voltage, &[], 1).is_err());
}
