//! End-to-end acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails or exceeds its time budget.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use qgw_core::qfun::GroupModel;
use qgw_core::report::{run_check, CheckKind, RunConfig};
use qgw_core::rmat::Series;
use serde_json::Value;

type Outcome = Result<Vec<String>, String>;

fn cfg(series: Series, rank: usize) -> RunConfig {
    RunConfig::new(series, rank)
}

fn detail(kind: CheckKind, c: &RunConfig) -> Result<Value, String> {
    let o = run_check(kind, c).map_err(|e| format!("{} {}{}: {e}", kind.name(), c.series, c.rank))?;
    if !o.pass {
        return Err(format!("{} {}{} reported fail: {}", kind.name(), c.series, c.rank, o.detail));
    }
    Ok(o.detail)
}

fn dims(v: &Value) -> Vec<u64> {
    v.as_array().map(|a| a.iter().filter_map(Value::as_u64).collect()).unwrap_or_default()
}

fn expect(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn r_gate() -> Outcome {
    let mut notes = Vec::new();
    for (s, r) in [(Series::A, 1), (Series::A, 2), (Series::B, 1), (Series::C, 1)] {
        let c = cfg(s, r);
        let q = detail(CheckKind::Qybe, &c)?;
        let cy = detail(CheckKind::Cybe, &c)?;
        expect(q["qybe"] == "pass" && q["classical_limit_identity"] == "pass", format!("{s}{r} qybe"))?;
        if s == Series::A {
            expect(q["hecke"] == "pass", format!("{s}{r} hecke"))?;
        }
        expect(cy["cybe"] == "pass", format!("{s}{r} cybe"))?;
        notes.push(format!("{s}{r}"));
    }
    Ok(notes)
}

fn flatness() -> Outcome {
    let mut notes = Vec::new();
    for (rank, d, want) in [(1, 4, vec![1, 4, 10, 20, 35]), (2, 2, vec![1, 9, 45])] {
        let mut c = cfg(Series::A, rank);
        c.max_degree = Some(d);
        let v = detail(CheckKind::Flatness, &c)?;
        for alg in ["frt", "re"] {
            let got = dims(&v["algebras"][alg]["dims"]);
            let classical = dims(&v["algebras"][alg]["classical_dims"]);
            expect(got == want && classical == want, format!("A{rank} {alg}: {got:?} vs {want:?}"))?;
        }
        notes.push(format!("A{rank} {want:?}"));
    }
    Ok(notes)
}

fn group_models() -> Outcome {
    let mut notes = Vec::new();
    let mut c = cfg(Series::A, 1);
    c.model = Some(GroupModel::Sharp);
    c.max_degree = Some(4);
    let v = detail(CheckKind::Flatness, &c)?;
    let want = vec![1, 5, 14, 30, 55];
    for alg in ["frt", "re"] {
        let got = dims(&v["algebras"][alg]["dims"]);
        expect(got == want, format!("A1 sharp {alg}: {got:?}"))?;
    }
    notes.push(format!("A1 sharp {want:?}"));
    for s in [Series::B, Series::C] {
        let mut c = cfg(s, 1);
        c.max_degree = Some(3);
        let v = detail(CheckKind::Flatness, &c)?;
        expect(v["determinant_relation_used"] == false, format!("{s}1 used a determinant relation"))?;
        for alg in ["frt", "re"] {
            let got = dims(&v["algebras"][alg]["dims"]);
            let classical = dims(&v["algebras"][alg]["classical_dims"]);
            expect(got == classical && got.len() == 4, format!("{s}1 {alg}: {got:?} vs {classical:?}"))?;
        }
        notes.push(format!("{s}1 {:?}", dims(&v["algebras"]["re"]["dims"])));
    }
    Ok(notes)
}

fn twist() -> Outcome {
    let mut notes = Vec::new();
    for (s, r) in [(Series::A, 1), (Series::A, 2), (Series::B, 1)] {
        let v = detail(CheckKind::Twist, &cfg(s, r))?;
        expect(v["frt_to_re"] == true, format!("{s}{r} FRT span does not transport to RE span"))?;
        expect(v["omega3_partition_independent"] == true, format!("{s}{r} partition dependence"))?;
        if s == Series::B {
            expect(v["metric_relations"] == true, "B1 metric relations do not transport")?;
        }
        notes.push(format!("{s}{r}"));
    }
    Ok(notes)
}

fn jacobi() -> Outcome {
    let mut notes = Vec::new();
    for r in [1, 2] {
        let v = detail(CheckKind::Jacobi, &cfg(Series::A, r))?;
        for k in ["DS", "STS"] {
            let j = &v[k]["jacobi"];
            expect(j["mode"] == "symbolic" && j["nonzero"] == 0, format!("A{r} {k} jacobiator"))?;
        }
        notes.push(format!("A{r} symbolic"));
    }
    for s in [Series::B, Series::C] {
        let v = detail(CheckKind::Jacobi, &cfg(s, 1))?;
        let j = &v["STS"]["jacobi"];
        let points = j["points"].as_u64().unwrap_or(0);
        expect(points >= 20 && j["nonzero"] == 0, format!("{s}1 STS at {points} points"))?;
        if s == Series::B {
            expect(j["off_variety_nonzero"] == true, "B1 off-variety jacobiator vanished")?;
        }
        notes.push(format!("{s}1 {points} points"));
    }
    Ok(notes)
}

fn semiclassical() -> Outcome {
    let mut notes = Vec::new();
    for r in [1, 2] {
        let v = detail(CheckKind::Semiclassical, &cfg(Series::A, r))?;
        expect(v["same_constant"] == true, format!("A{r} constants differ"))?;
        for p in ["frt/DS", "re/STS"] {
            expect(v["pairings"][p]["consistent"] == true, format!("A{r} {p} inconsistent"))?;
        }
        notes.push(format!("A{r} c={}", v["constant"].as_str().unwrap_or("?")));
    }
    Ok(notes)
}

fn center() -> Outcome {
    let mut c = cfg(Series::A, 1);
    c.max_degree = Some(4);
    let v = detail(CheckKind::Center, &c)?;
    let rows = v["re"]["rows"].as_array().cloned().unwrap_or_default();
    let got: Vec<u64> = rows.iter().filter_map(|r| r["dim"].as_u64()).collect();
    expect(got == vec![1, 1, 2, 2, 3], format!("RE center dims {got:?}"))?;
    for r in &rows {
        expect(
            r["classical_by_derivations"] == r["dim"] && r["classical_by_group_points"] == r["dim"],
            format!("classical mismatch at degree {}", r["degree"]),
        )?;
    }
    expect(v["frt_degree1_center_dim"] == 0, "FRT degree-1 center is nonzero")?;
    expect(v["re"]["pairwise_commute"] == true, "center basis does not commute")?;
    expect(v["transported_center"]["pass"] == true, "transported center check failed")?;
    Ok(vec![format!("RE {got:?}")])
}

fn freeness() -> Outcome {
    let v = detail(CheckKind::Freeness, &cfg(Series::A, 1))?;
    let rep = &v["report"];
    let rows = rep["rows"].as_array().cloned().unwrap_or_default();
    let e: Vec<u64> = rows.iter().filter_map(|r| r["dim_e"].as_u64()).collect();
    let i: Vec<u64> = rows.iter().filter_map(|r| r["dim_i"].as_u64()).collect();
    let a: Vec<u64> = rows.iter().filter_map(|r| r["dim_a"].as_u64()).collect();
    expect(e == vec![1, 3, 5, 7, 9], format!("E dims {e:?}"))?;
    for d in 0..a.len() {
        let conv: u64 = (0..=d).map(|k| e[k] * i[d - k]).sum();
        expect(conv == a[d], format!("convolution at degree {d}: {conv} vs {}", a[d]))?;
    }
    expect(rows.iter().all(|r| r["rank"] == r["products"] && r["products"] == r["dim_a"]), "not bijective")?;
    let neg = v["negative_control"]["rows"].as_array().cloned().unwrap_or_default();
    let first_fail = neg.iter().find(|r| r["pass"] == false).and_then(|r| r["degree"].as_u64());
    expect(matches!(first_fail, Some(d) if d <= 3), format!("negative control first failure {first_fail:?}"))?;
    Ok(vec![format!("E {e:?}, A(4) = {}", a[4]), format!("control fails at degree {}", first_fail.unwrap_or(0))])
}

fn determinism() -> Outcome {
    let run = || -> Result<Vec<u8>, String> {
        let out = Command::new(env!("CARGO_BIN_EXE_qgw"))
            .args(["report", "--series", "A", "--rank", "1"])
            .output()
            .map_err(|e| e.to_string())?;
        expect(out.status.success(), format!("report exited with {}", out.status))?;
        Ok(out.stdout)
    };
    let a = run()?;
    let b = run()?;
    expect(!a.is_empty() && a == b, "report output differs between runs")?;
    Ok(vec![format!("{} bytes", a.len())])
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("r-matrix gate", r_gate, Duration::from_secs(10)),
        ("flatness", flatness, Duration::from_secs(120)),
        ("group models", group_models, Duration::from_secs(300)),
        ("twist correspondence", twist, Duration::from_secs(120)),
        ("poisson jacobi", jacobi, Duration::from_secs(120)),
        ("semiclassical limit", semiclassical, Duration::from_secs(60)),
        ("center", center, Duration::from_secs(120)),
        ("freeness", freeness, Duration::from_secs(180)),
        ("determinism", determinism, Duration::from_secs(120)),
    ];
    let mut failed = 0;
    for (n, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = f();
        let took = start.elapsed();
        let (ok, msg) = match res {
            Ok(notes) if took <= *limit => (true, notes.join("; ")),
            Ok(notes) => (false, format!("{} (over budget {:?})", notes.join("; "), limit)),
            Err(e) => (false, e),
        };
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {}: {:<22} {} [{:.2}s / {}s] {}",
            n + 1,
            name,
            if ok { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            msg
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
