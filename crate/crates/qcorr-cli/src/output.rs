//! Plain-text rendering of reports. Six decimal places for values in
//! bits; angles stay in radians.

use qcorr::discovery::{CoincidenceSuite, MonogamySuite, SearchMode, SearchResult};
use qcorr::pairwise::{Discord, PairwiseReport, Side};
use qcorr::tripartite::{ClaimChainVerdict, TripartiteReport};

pub fn fmt(x: f64) -> String {
    let s = format!("{x:.6}");
    // a hair below zero rounds to "-0.000000"; print it as zero
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn side_name(side: Side, labels: &(String, String)) -> String {
    match side {
        Side::First => labels.0.clone(),
        Side::Second => labels.1.clone(),
    }
}

fn discord_row(d: &Discord, labels: &(String, String)) -> String {
    format!(
        "  measure {:<4} J = {}  D = {}  basis (theta, phi) = ({}, {})  evals = {}",
        side_name(d.measured, labels),
        fmt(d.classical),
        fmt(d.discord),
        fmt(d.basis.theta),
        fmt(d.basis.phi),
        d.evaluations,
    )
}

pub fn print_pairwise(rep: &PairwiseReport, only: Option<Side>) {
    let (a, b) = &rep.labels;
    println!("pair ({a}, {b}), all quantities in bits");
    println!(
        "  S({a}) = {}  S({b}) = {}  S({a}{b}) = {}",
        fmt(rep.entropy_first),
        fmt(rep.entropy_second),
        fmt(rep.entropy_joint),
    );
    println!("  mutual information I = {}", fmt(rep.mutual_information));
    match only {
        Some(Side::First) => println!("{}", discord_row(&rep.measured_first, &rep.labels)),
        Some(Side::Second) => println!("{}", discord_row(&rep.measured_second, &rep.labels)),
        None => {
            println!("{}", discord_row(&rep.measured_first, &rep.labels));
            println!("{}", discord_row(&rep.measured_second, &rep.labels));
        }
    }
    println!(
        "  concurrence = {}  entanglement of formation = {}",
        fmt(rep.concurrence),
        fmt(rep.entanglement_of_formation),
    );
}

pub fn print_tripartite(rep: &TripartiteReport) {
    let l = &rep.labels;
    println!(
        "subsystems ({}, {}, {}), policy {:?}, all quantities in bits",
        l[0], l[1], l[2], rep.policy
    );
    println!(
        "  S({}) = {}  S({}) = {}  S({}) = {}  S({}{}{}) = {}",
        l[0],
        fmt(rep.profile.singles[0]),
        l[1],
        fmt(rep.profile.singles[1]),
        l[2],
        fmt(rep.profile.singles[2]),
        l[0],
        l[1],
        l[2],
        fmt(rep.profile.joint),
    );
    println!("  total correlation T = {}", fmt(rep.total_information));
    println!("  pair            I         J(first)  J(second) D(first)  D(second) C         E");
    for (block, resolved) in rep.pairs.iter().zip(rep.resolved.iter()) {
        println!(
            "  {:<6} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}   resolved J = {} ({:?}), D = {} ({:?})",
            block.pair,
            fmt(block.mutual_information),
            fmt(block.first.j),
            fmt(block.second.j),
            fmt(block.first.d),
            fmt(block.second.d),
            fmt(block.concurrence),
            fmt(block.entanglement_of_formation),
            fmt(resolved.j),
            resolved.j_side,
            fmt(resolved.d),
            resolved.d_side,
        );
    }
    println!(
        "  t2 = {} (pair {})  t3 = T - t2 = {}",
        fmt(rep.t2),
        rep.t2_pair,
        fmt(rep.t3),
    );
    println!(
        "  j2 = {} (pair {})  d2 = {} (pair {})",
        fmt(rep.j2),
        rep.j2_pair,
        fmt(rep.d2),
        rep.d2_pair,
    );
    println!(
        "  peel-first:  genuine total = {}  classical = {}  quantum = {}  (measured {})",
        fmt(rep.def1_total),
        fmt(rep.def1_split.classical),
        fmt(rep.def1_split.quantum),
        rep.def1_split.measured,
    );
    match &rep.def2_split {
        Some(split) => println!(
            "  subtractive: genuine total = {}  classical = {}  quantum = {}  ({:?}, measured {})",
            fmt(rep.def2_sum),
            fmt(split.classical),
            fmt(split.quantum),
            split.convention,
            split.measured,
        ),
        None => println!(
            "  subtractive: genuine total = {}  (no split convention given)",
            fmt(rep.def2_sum),
        ),
    }
    println!("  gap delta = {}", fmt(rep.gap_delta));
}

pub fn print_chain(verdict: &ClaimChainVerdict) {
    println!(
        "  point (p1, theta1, p2, theta2) = ({}, {}, {}, {})",
        fmt(verdict.params.p1),
        fmt(verdict.params.theta1),
        fmt(verdict.params.p2),
        fmt(verdict.params.theta2),
    );
    for step in &verdict.steps {
        let mark = if step.holds { "pass" } else { "FAIL" };
        println!("  step {} {}  {}", step.index, mark, step.claim);
    }
    println!(
        "  overall: {}",
        if verdict.overall {
            "every step holds"
        } else {
            "the chain breaks"
        }
    );
    let v = &verdict.values;
    println!(
        "  I = ({}, {}, {})  t2 = {} (pair {})",
        fmt(v.pair_mi[0]),
        fmt(v.pair_mi[1]),
        fmt(v.pair_mi[2]),
        fmt(v.t2),
        v.t2_pair,
    );
    println!(
        "  C(outer pair) = {}  E(outer pair) = {}",
        fmt(v.concurrence_ac),
        fmt(v.eof_ac),
    );
    println!(
        "  D(ab|b) = {}  D(bc|b) = {}  D(ac|a) = {}  D(ac|c) = {}",
        fmt(v.d_ab_given_b),
        fmt(v.d_bc_given_b),
        fmt(v.d_ac_given_a),
        fmt(v.d_ac_given_c),
    );
    println!(
        "  j2 = {} (pair {})  d2 = {} (pair {})  delta = {}",
        fmt(v.j2),
        v.j2_pair,
        fmt(v.d2),
        v.d2_pair,
        fmt(v.delta),
    );
    if !verdict.discrepancies.is_empty() {
        println!("  quantity   computed   quoted     difference  within 0.02");
        for d in &verdict.discrepancies {
            println!(
                "  {:<9} {:>9} {:>9} {:>11}  {}",
                d.quantity,
                fmt(d.computed),
                fmt(d.quoted),
                fmt(d.difference),
                if d.within_tolerance { "yes" } else { "no" },
            );
        }
    }
}

pub fn print_search(res: &SearchResult) {
    let mode = match res.spec.mode {
        SearchMode::FamilyGrid { steps } => format!("family grid, {steps} steps per axis"),
        SearchMode::FamilyRandom { samples } => format!("family random, {samples} samples"),
        SearchMode::MixedRandom { samples, rank } => {
            format!("mixed random, {samples} samples of rank {rank}")
        }
    };
    println!(
        "search: {mode}, seed {}, objective {:?}, policy {:?}",
        res.spec.seed, res.spec.objective, res.spec.policy
    );
    print!("evaluated {} points", res.evaluated);
    if let Some(valid) = res.valid_points {
        print!(", {valid} satisfied the whole chain");
    }
    println!(" in {:.2}s", res.wall.as_secs_f64());
    if res.no_valid_point {
        println!("no point satisfied the objective");
        return;
    }
    if let Some(hit) = &res.family {
        println!(
            "best point: index {} with delta = {}",
            hit.index,
            fmt(hit.delta)
        );
        print_chain(&hit.verdict);
    }
    if let Some(hit) = &res.mixed {
        println!(
            "largest |delta| = {} at sample {} (canonical-frame state in the JSON payload)",
            fmt(hit.delta.abs()),
            hit.index,
        );
    }
}

pub fn print_coincidence(suite: &CoincidenceSuite) {
    println!(
        "  {} seeded pure states (seed {}): max |delta| = {} at sample {}",
        suite.samples,
        suite.seed,
        format_args!("{:.3e}", suite.max_abs_delta),
        suite.max_abs_delta_index,
    );
    if suite.clean() {
        println!("  decompositions coincide and the strongest pair leads on every sample");
    } else {
        for v in &suite.gap_violations {
            println!(
                "  VIOLATION sample {}: |delta| = {:.3e} exceeds the coincidence tolerance",
                v.index,
                v.delta.abs(),
            );
        }
        for v in &suite.ordering_violations {
            println!(
                "  VIOLATION sample {}: discords ({}, {}, {}) do not lead with the strongest pair",
                v.index,
                fmt(v.discords[0]),
                fmt(v.discords[1]),
                fmt(v.discords[2]),
            );
        }
        println!("  violating states are serialized in full in the JSON payload");
    }
}

pub fn print_monogamy(suite: &MonogamySuite) {
    println!(
        "  {} seeded pure states (seed {}): max |residual| = {} at sample {}, mean = {}",
        suite.samples,
        suite.seed,
        format_args!("{:.3e}", suite.max_abs_residual),
        suite.max_abs_residual_index,
        format_args!("{:.3e}", suite.mean_abs_residual),
    );
}
