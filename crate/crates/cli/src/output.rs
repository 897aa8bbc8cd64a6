use lo_einstein::catalog::{Catalog, PartitionSummary};
use lo_einstein::isometry::ClassReport;
use lo_einstein::solver::CriticalPointSet;
use lo_einstein::Metric;
use std::io::Write;
use std::path::Path;

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub fn to_json<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("result types serialize");
    out.push(b'\n');
    out
}

fn flat(m: &Metric) -> String {
    m.as_frame()
        .as_slice()
        .iter()
        .map(f64::to_string)
        .collect::<Vec<_>>()
        .join(";")
}

fn finish(w: csv::Writer<Vec<u8>>) -> Vec<u8> {
    w.into_inner().expect("in-memory writer")
}

pub fn points_csv(set: &CriticalPointSet) -> csv::Result<Vec<u8>> {
    let n = set.n;
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["index".to_string()];
    header.extend((1..=n).map(|i| format!("x{i}")));
    for i in 2..=n {
        for j in 1..i {
            header.push(format!("u{i}{j}"));
        }
    }
    header.extend(["s_tilde", "volume", "residual_norm"].map(String::from));
    w.write_record(&header)?;
    for (k, p) in set.points.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(p.coords.x.iter().chain(&p.coords.u).map(f64::to_string));
        row.extend([p.s_tilde, p.volume, p.residual_norm].map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    Ok(finish(w))
}

pub fn classes_csv(report: &ClassReport) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["class", "volume", "s_tilde", "member_indices", "canonical_matrix"])?;
    for (k, c) in report.classes.iter().enumerate() {
        let members = c.members.iter().map(usize::to_string).collect::<Vec<_>>().join(";");
        w.write_record([
            k.to_string(),
            c.volume.to_string(),
            c.s_tilde.to_string(),
            members,
            flat(&c.canonical),
        ])?;
    }
    Ok(finish(w))
}

pub fn catalog_csv(cat: &Catalog) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["section", "index", "value"])?;
    for (k, p) in cat.partitions.iter().enumerate() {
        let parts = p.parts().iter().map(usize::to_string).collect::<Vec<_>>().join(";");
        w.write_record(["partition".to_string(), k.to_string(), parts])?;
    }
    for (k, m) in cat.routine_points.iter().enumerate() {
        w.write_record(["routine_point".to_string(), k.to_string(), flat(m)])?;
    }
    Ok(finish(w))
}

pub fn bounds_csv(rows: &[PartitionSummary]) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "n",
        "p_n",
        "maroti_bound",
        "hardy_ramanujan",
        "rem_sum_bound",
        "rem_sqrt2_bound",
        "maroti_holds",
    ])?;
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.p_n.to_string(),
            r.maroti_bound.to_string(),
            r.hardy_ramanujan.to_string(),
            r.rem_sum_bound.to_string(),
            r.rem_sqrt2_bound.to_string(),
            r.maroti_holds.to_string(),
        ])?;
    }
    Ok(finish(w))
}

pub fn matrices_csv(named: &[(&str, &Metric)]) -> csv::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["matrix", "row", "entries"])?;
    for (name, m) in named {
        for (i, row) in m.to_rows().iter().enumerate() {
            let entries = row.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
            w.write_record([name.to_string(), i.to_string(), entries])?;
        }
    }
    Ok(finish(w))
}
