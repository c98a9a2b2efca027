// scratch: audit timings (deleted before release)
fn main() {
    let t0 = std::time::Instant::now();
    let nv = chaos_core::audit::default_n_values();
    let rep = chaos_core::audit::partition_audit(8, &nv).unwrap();
    println!(
        "partition_audit(8, 11 N values): all_pass={} rows={} ({:?})",
        rep.all_pass,
        rep.rows.len(),
        t0.elapsed()
    );
    let t0 = std::time::Instant::now();
    let rep = chaos_core::audit::operator_audit(1000, 2024).unwrap();
    println!(
        "operator_audit(1000): all_pass={} min_slack={:.3e} ({:?})",
        rep.all_pass,
        rep.min_slack,
        t0.elapsed()
    );
}
