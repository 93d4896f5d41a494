//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use dnadm::compiler::{compile, CompileOptions, EnzymeLibrary, Role};
use dnadm::decision::best_options;
use dnadm::gel::{length_at, merge_bands, migrate, migrate_with, relative_intensity, GelConfig};
use dnadm::pipeline;
use dnadm::sampling::{random_matrix, MatrixShape};
use dnadm::scalar::big;
use dnadm::strand::{cut, cut_at, find_sites, Base, Duplex, RecognitionSite, Strand};
use dnadm::wetlab::{apply_thresholds, assemble, mix, pcr, Species, SpeciesKind, Status};
use dnadm::{Matrix, Rational, Tube};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn canonical_run(cycles: i64) -> Result<pipeline::Run<Rational>, String> {
    pipeline::run(&Matrix::ball_game(), &CompileOptions::default(), cycles, &GelConfig::default())
        .map_err(|e| e.to_string())
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let run = canonical_run(5)?;
    let elapsed = start.elapsed();
    let expected: [Vec<(usize, i64)>; 3] = [
        vec![(147, 4), (156, 3)],
        vec![(147, 4), (174, 2)],
        vec![(156, 3), (174, 2)],
    ];
    ensure(run.gel.lanes.len() == 3, || format!("{} lanes", run.gel.lanes.len()))?;
    for (k, want) in expected.iter().enumerate() {
        let lane = &run.gel.lanes[k];
        let got: Vec<(usize, Rational)> = lane
            .bands
            .iter()
            .map(|b| (b.length, relative_intensity(b, lane, &run.plan)))
            .collect();
        let want: Vec<(usize, Rational)> = want.iter().map(|&(l, i)| (l, big(i, 1))).collect();
        ensure(got == want, || format!("tube {}: {:?}", k + 1, got))?;
    }
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!("4:3, 4:2, 3:2 at 147/156/174 bp in {elapsed:.0?}"))
}

fn criterion_2() -> Outcome {
    let run = canonical_run(5)?;
    ensure(run.report.chosen == vec![0], || format!("chosen {:?}", run.report.chosen))?;
    ensure(best_options(&Matrix::ball_game()) == vec![0], || "oracle differs".into())?;
    ensure(run.report.agree, || "disagreement".into())?;
    Ok(run.report.summary())
}

fn criterion_3() -> Outcome {
    let (plan, _) = compile(&Matrix::ball_game(), &CompileOptions::default()).map_err(|e| e.to_string())?;
    let want = vec![big(5, 9), big(6, 9), big(7, 9)];
    ensure(plan.threshold_ratios == want, || format!("{:?}", plan.threshold_ratios))?;
    Ok("5/9, 2/3, 7/9".into())
}

fn criterion_4() -> Outcome {
    let (plan, _) = compile(&Matrix::ball_game(), &CompileOptions::default()).map_err(|e| e.to_string())?;
    let tube = assemble(apply_thresholds(mix(&plan)), &plan);
    let conc = |t: &Tube, path: (usize, usize)| -> Rational {
        t.constructs()
            .find(|s| s.path() == Some(path))
            .map(|s| s.concentration.clone())
            .unwrap_or_default()
    };
    // one unit is 1/D = 1/9 of the mixture
    let unit = big(1, 9);
    let before = conc(&tube, (0, 0)) - conc(&tube, (0, 1));
    ensure(before == unit, || format!("initial difference {before}"))?;
    let after_tube = pcr(tube.clone(), plan.primers(), 5).map_err(|e| e.to_string())?;
    let after = conc(&after_tube, (0, 0)) - conc(&after_tube, (0, 1));
    ensure(after == big(32, 1) * unit.clone(), || format!("after 5 cycles {after}"))?;
    for n in 0..10u32 {
        let t = pcr(tube.clone(), plan.primers(), n as i64).map_err(|e| e.to_string())?;
        let factor = big(1 << n, 1);
        for (a, b) in tube.constructs().zip(t.constructs()) {
            ensure(b.concentration == a.concentration.clone() * factor.clone(), || format!("n = {n}"))?;
        }
    }
    Ok("1 unit -> 32 units at n = 5; x2^n for n in 0..10".into())
}

fn criterion_5() -> Outcome {
    let (plan, _) = compile(&Matrix::ball_game(), &CompileOptions::default()).map_err(|e| e.to_string())?;
    let hosts = (0..3)
        .map(|i| (Role::Option(i), plan.option_enzymes[i].clone()))
        .chain((0..3).map(|j| (Role::Utility(j), plan.outcome_enzymes[j].clone())));
    let mut names = Vec::new();
    for (role, enzyme) in hosts {
        let top = plan.sequences.strands[&role].top().clone();
        ensure(top.len() == 20, || format!("{role} is {} nt", top.len()))?;
        let duplex = Duplex::from_top(top);
        let pieces = cut(&duplex, &enzyme);
        ensure(pieces.len() == 2, || format!("{role}/{}: {} pieces", enzyme.name(), pieces.len()))?;
        for p in &pieces {
            ensure(p.len() == 10 && p.is_blunt(), || {
                format!("{role}/{}: fragment {} bp, overhangs {:?}", enzyme.name(), p.len(), p.overhangs())
            })?;
        }
        names.push(enzyme.name().to_string());
    }
    ensure(names.len() == 6, || "fewer than six enzymes".into())?;
    Ok(format!("10 + 10 blunt for {}", names.join(", ")))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let shape = MatrixShape::default();
    let options = CompileOptions {
        library: EnzymeLibrary::extended(),
        ..CompileOptions::default()
    };
    let total = 200;
    for k in 0..total {
        let matrix: Matrix = random_matrix(&mut rng, &shape);
        let opts = CompileOptions {
            seed: k as u64,
            ..options.clone()
        };
        let run = pipeline::run(&matrix, &opts, 5, &GelConfig::default()).map_err(|e| format!("matrix {k}: {e}"))?;
        let oracle = best_options(&matrix);
        ensure(run.report.chosen == oracle, || {
            format!("matrix {k}: readout {:?}, oracle {:?}", run.report.chosen, oracle)
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(30), || format!("took {elapsed:?}"))?;
    Ok(format!("{total}/{total} agree in {elapsed:.1?}"))
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let den = rng.gen_range(1..=60i64);
    big(rng.gen_range(0..=2 * den), den)
}

fn random_bases(rng: &mut ChaCha8Rng, len: usize) -> Vec<Base> {
    (0..len).map(|_| Base::ALL[rng.gen_range(0..4)]).collect()
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // displacement
    for k in 0..1000 {
        let n = rng.gen_range(1..=5);
        let m = rng.gen_range(1..=5);
        let mut tube = Tube::empty("t", n, m);
        for i in 0..n {
            for j in 0..m {
                for role in [Role::Chance(i, j), Role::Threshold(i, j)] {
                    tube.species.push(Species {
                        kind: SpeciesKind::Component(role),
                        concentration: random_rational(&mut rng),
                        status: Status::Active,
                    });
                }
            }
        }
        let after = apply_thresholds(tube.clone());
        for i in 0..n {
            for j in 0..m {
                for role in [Role::Chance(i, j), Role::Threshold(i, j)] {
                    ensure(after.material(role) == tube.material(role), || format!("displacement instance {k}, {role}"))?;
                }
            }
        }
    }
    // cutting
    let library = EnzymeLibrary::extended();
    for k in 0..1000 {
        let len = rng.gen_range(12..120);
        let mut top = random_bases(&mut rng, len);
        let enzyme: &RecognitionSite = &library.as_slice()[rng.gen_range(0..library.len())];
        for _ in 0..rng.gen_range(0..3) {
            let at = rng.gen_range(0..=len - enzyme.len());
            top[at..at + enzyme.len()].copy_from_slice(enzyme.site());
        }
        let left = rng.gen_range(0..6usize);
        let right = rng.gen_range(0..6usize);
        let strand = Strand::new(top.clone()).map_err(|e| e.to_string())?;
        let full = Duplex::from_top(strand);
        let bottom = full.bottom().bases();
        let trimmed = Strand::new(bottom[right..bottom.len() - left].to_vec()).map_err(|e| e.to_string())?;
        let duplex = Duplex::new(full.top().clone(), trimmed, left as i64).map_err(|e| e.to_string())?;
        let sites = find_sites(&duplex, enzyme);
        let columns: Vec<i64> = sites.iter().map(|p| p + enzyme.cut_offset() as i64).collect();
        let pieces = cut_at(&duplex, &columns);
        ensure(pieces.len() == cut(&duplex, enzyme).len(), || format!("cut instance {k}: cut/cut_at differ"))?;
        let top_sum: usize = pieces.iter().map(|p| p.top().len()).sum();
        let bottom_sum: usize = pieces.iter().map(|p| p.bottom().len()).sum();
        ensure(
            top_sum == duplex.top().len() && bottom_sum == duplex.bottom().len(),
            || format!("cut instance {k}: {top_sum}/{bottom_sum}"),
        )?;
        let distinct: std::collections::BTreeSet<i64> = columns.iter().copied().collect();
        ensure(pieces.len() == distinct.len() + 1, || format!("cut instance {k}: piece count"))?;
    }
    // band merging
    for k in 0..1000 {
        let raw: Vec<(usize, Rational)> = (0..rng.gen_range(0..12))
            .map(|_| (rng.gen_range(10..300), random_rational(&mut rng)))
            .collect();
        let before = raw.iter().fold(big(0, 1), |a, (_, i)| a + i.clone());
        let merged = merge_bands(raw, rng.gen_range(1..20));
        let after = merged.iter().fold(big(0, 1), |a, (_, i)| a + i.clone());
        ensure(before == after, || format!("merge instance {k}"))?;
    }
    Ok("displacement, cut lengths and band merging conserved on 1000 instances each".into())
}

fn criterion_8() -> Outcome {
    let config = GelConfig::default();
    let dye = migrate(config.dye_length, &config).map_err(|e| e.to_string())?;
    ensure(dye == config.gel_length * 2.0 / 3.0, || format!("dye at {dye}"))?;
    ensure(dye == config.dye_distance(), || "dye distance mismatch".into())?;
    let d: Vec<f64> = (10..=200).map(|l| migrate(l, &config).unwrap()).collect();
    ensure(d.windows(2).all(|w| w[1] < w[0]), || "migration not strictly decreasing".into())?;
    let l_max = config.ladder_max();
    let mut worst = 0.0f64;
    for &l in &config.ladder {
        let dist = migrate_with(l, &config, l_max).map_err(|e| e.to_string())?;
        let back = length_at(dist, &config, l_max);
        worst = worst.max((back - l as f64).abs());
    }
    ensure(worst <= 1.0, || format!("ladder round trip off by {worst}"))?;
    Ok(format!("dye at 2/3, strictly decreasing over 10-200 bp, ladder round trip within {worst:.1e} bp"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("canonical band table", criterion_1),
        ("decision reproduction", criterion_2),
        ("threshold ratios", criterion_3),
        ("PCR arithmetic", criterion_4),
        ("digestion geometry", criterion_5),
        ("end-to-end soundness", criterion_6),
        ("conservation", criterion_7),
        ("gel calibration", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    println!("acceptance: {}/{} passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
