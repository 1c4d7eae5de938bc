//! Named verification suites: curated bundles of the crate's structural
//! checks over one field tower, each check timed and reported uniformly.
//!
//! Four suites exist.  `spread` covers the field isomorphism, the spread
//! construction, field reduction, and the two action equivalences;
//! `groups` covers the matrix groups, their Singer subgroups, stabilizers,
//! and orbit partitions; `flags` covers the flag metric, the
//! optimum-distance characterization and constructions, and the known
//! counterexample; `slow` holds the exhaustive subgroup searches, which
//! are opt-in because they dwarf everything else.  `all` runs the first
//! three.
//!
//! Checks only run where they apply: odd-characteristic statements are
//! skipped over even fields and vice versa, parameter-specific statements
//! run only at their parameters, and cases needing a full sweep of the
//! big block group are limited to group orders where that sweep stays
//! interactive.

use serde::{Deserialize, Serialize};
use std::time::Instant;

use crate::flags::{
    build_odfc, characterization_check, complete_to_full_flag, disjointness_equivalence_check,
    distance_bound_check, largest_size_union_check, max_size_check, no_single_orbit_odfc_check,
    odfc_orbit_size_check, orbit_flag_code, orbit_odfc_sufficiency_check,
    reproduce_nondisjoint_example, stabilizer_containment_check,
    stabilizer_flag_decomposition_check, standard_full_flag, union_theorem_check, FlagCode,
};
use crate::galois::FieldTower;
use crate::groups::{
    build_g, build_gbar, build_singer, gbar_structure_check, line_orbit_partition_check,
    line_two_orbit_check, no_transitive_order_search_check, order_search_found_check,
    psi_image_check, singer_definition_check, singer_stabilizer_checks, sl2_generators_check,
    spread_orbit_check, spread_orbit_partition_check, spread_stabilizer_check,
    spread_two_orbit_check, MatrixGroup,
};
use crate::matspace::SubspaceCode;
use crate::report::{CheckItem, CheckReport};
use crate::spread::{
    action_equivalence_check, build_segre_spread, field_iso_check, field_reduction_check,
    first_summand, psi_check, second_summand, spread_check,
};
use crate::{Error, Result};

/// Number of random samples used by the sampled equivalence checks.
const SAMPLE_SIZE: usize = 25;

/// Largest block-group order for which whole-group orbit cases run in the
/// default suites; bigger groups keep only their cyclic-subgroup cases.
const FULL_GROUP_CASE_LIMIT: usize = 1500;

/// Which bundle of checks to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Spread,
    Groups,
    Flags,
    Slow,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite> {
        match s {
            "spread" => Ok(Suite::Spread),
            "groups" => Ok(Suite::Groups),
            "flags" => Ok(Suite::Flags),
            "slow" => Ok(Suite::Slow),
            "all" => Ok(Suite::All),
            other => Err(Error::BadInput(format!(
                "unknown suite {other:?}; expected spread, groups, flags, slow, or all"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Spread => "spread",
            Suite::Groups => "groups",
            Suite::Flags => "flags",
            Suite::Slow => "slow",
            Suite::All => "all",
        }
    }
}

/// One executed check with its wall-clock time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimedCheck {
    pub name: String,
    pub passed: bool,
    pub elapsed_ms: u64,
    pub items: Vec<CheckItem>,
}

/// Everything a verification run produced, ready for JSON output.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerificationReport {
    pub p: u64,
    pub e: usize,
    pub k: usize,
    pub suite: String,
    pub passed: bool,
    pub checks: Vec<TimedCheck>,
}

impl VerificationReport {
    /// Names of every failed check.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

fn push(checks: &mut Vec<TimedCheck>, started: Instant, report: CheckReport) {
    checks.push(TimedCheck {
        name: report.name,
        passed: report.passed,
        elapsed_ms: started.elapsed().as_millis() as u64,
        items: report.items,
    });
}

fn run_spread(tower: &FieldTower, checks: &mut Vec<TimedCheck>) {
    for f in [
        field_iso_check,
        spread_check,
        field_reduction_check,
    ] {
        let t = Instant::now();
        push(checks, t, f(tower));
    }
    let t = Instant::now();
    push(checks, t, action_equivalence_check(tower, SAMPLE_SIZE));
    let t = Instant::now();
    push(checks, t, psi_check(tower, SAMPLE_SIZE));
}

struct SharedGroups {
    g: MatrixGroup,
    gbar: MatrixGroup,
    embedded: MatrixGroup,
    spread: SubspaceCode,
}

fn build_shared(tower: &FieldTower) -> Result<SharedGroups> {
    Ok(SharedGroups {
        g: build_g(tower)?,
        gbar: build_gbar(tower)?,
        embedded: build_singer(tower)?.embedded,
        spread: build_segre_spread(tower),
    })
}

fn run_groups(
    tower: &FieldTower,
    shared: &SharedGroups,
    table_cap: u64,
    checks: &mut Vec<TimedCheck>,
) -> Result<()> {
    if tower.qk() <= 25 {
        let t = Instant::now();
        push(checks, t, sl2_generators_check(tower)?);
    }
    let t = Instant::now();
    push(checks, t, gbar_structure_check(tower)?);
    let t = Instant::now();
    push(checks, t, psi_image_check(tower, &shared.gbar, &shared.g));
    let t = Instant::now();
    push(checks, t, singer_definition_check(tower, &shared.g)?);
    let t = Instant::now();
    let both = singer_stabilizer_checks(tower)?;
    for report in both {
        push(checks, t, report);
    }
    let t = Instant::now();
    push(checks, t, line_orbit_partition_check(tower)?);
    if tower.p() != 2 {
        let t = Instant::now();
        push(checks, t, line_two_orbit_check(tower)?);
    }
    let t = Instant::now();
    push(checks, t, spread_orbit_check(tower, &shared.g)?);
    let t = Instant::now();
    push(checks, t, spread_stabilizer_check(tower, &shared.embedded, &shared.spread)?);
    let t = Instant::now();
    push(checks, t, spread_orbit_partition_check(tower, &shared.embedded, &shared.spread)?);
    if tower.p() != 2 {
        let t = Instant::now();
        push(checks, t, spread_two_orbit_check(tower, &shared.embedded, &shared.spread)?);
    }
    if tower.p() == 2 && shared.gbar.order() <= FULL_GROUP_CASE_LIMIT {
        let t = Instant::now();
        push(checks, t, order_search_found_check(tower, table_cap)?);
    }
    Ok(())
}

fn run_flags(
    tower: &FieldTower,
    shared: &SharedGroups,
    checks: &mut Vec<TimedCheck>,
) -> Result<()> {
    let ground = FieldTower::GROUND;
    let n = 2 * tower.k();
    let std = standard_full_flag(tower, ground, n);
    let f_u = complete_to_full_flag(tower, &first_summand(tower))?;
    let small = shared.g.order() <= FULL_GROUP_CASE_LIMIT;
    let trivial = MatrixGroup::trivial(ground, n);
    let h = &shared.embedded;

    let t = Instant::now();
    push(checks, t, distance_bound_check(tower));

    let decomposition_group = if small { &shared.g } else { h };
    let t = Instant::now();
    push(checks, t, stabilizer_flag_decomposition_check(tower, decomposition_group, &std)?);
    let t = Instant::now();
    push(checks, t, stabilizer_containment_check(tower, decomposition_group, &std)?);

    let mut cases: Vec<(&MatrixGroup, &crate::flags::Flag)> = vec![(h, &std), (&trivial, &std)];
    if small {
        cases.push((&shared.g, &std));
    }
    let t = Instant::now();
    push(checks, t, disjointness_equivalence_check(tower, &cases)?);

    let t = Instant::now();
    push(checks, t, orbit_odfc_sufficiency_check(tower, h, &f_u)?);

    let union_flags = if tower.p() == 2 {
        vec![f_u.clone()]
    } else {
        vec![f_u.clone(), complete_to_full_flag(tower, &second_summand(tower))?]
    };
    let t = Instant::now();
    push(checks, t, union_theorem_check(tower, h, &union_flags)?);

    let mut batch: Vec<FlagCode> = vec![
        build_odfc(tower)?,
        orbit_flag_code(tower, h, &std)?,
        FlagCode::from_flags(vec![std.clone()])?,
    ];
    if small {
        batch.push(orbit_flag_code(tower, &shared.g, &std)?);
    }
    // A deliberate corruption: replace one constructed codeword so at
    // least one batch member fails at least one criterion.
    let mut mutated = batch[0].flags().to_vec();
    if !mutated.contains(&std) {
        mutated[0] = std.clone();
    } else {
        mutated.truncate(mutated.len() - 1);
    }
    batch.push(FlagCode::from_flags(mutated)?);

    let t = Instant::now();
    push(checks, t, characterization_check(tower, &batch));
    let t = Instant::now();
    push(checks, t, max_size_check(tower, &batch));
    let t = Instant::now();
    push(checks, t, odfc_orbit_size_check(tower)?);
    if tower.p() != 2 {
        let t = Instant::now();
        push(checks, t, largest_size_union_check(tower)?);
    }
    if tower.q() == 2 && tower.k() == 2 {
        let t = Instant::now();
        push(checks, t, reproduce_nondisjoint_example(tower)?);
    }
    Ok(())
}

fn run_slow(tower: &FieldTower, table_cap: u64, checks: &mut Vec<TimedCheck>) -> Result<()> {
    if tower.q() == 3 && tower.k() == 2 {
        let t = Instant::now();
        push(checks, t, no_transitive_order_search_check(tower, table_cap)?);
        let t = Instant::now();
        push(checks, t, no_single_orbit_odfc_check(tower, table_cap)?);
    }
    if tower.p() == 2 {
        let gbar = build_gbar(tower)?;
        let order = gbar.order() as u64;
        if order > FULL_GROUP_CASE_LIMIT as u64 && order.saturating_mul(order) <= table_cap {
            let t = Instant::now();
            push(checks, t, order_search_found_check(tower, table_cap)?);
        }
    }
    if checks.is_empty() {
        checks.push(TimedCheck {
            name: "slow_suite_empty".to_string(),
            passed: true,
            elapsed_ms: 0,
            items: vec![CheckItem::require(
                "no exhaustive search is defined at these parameters",
                true,
            )],
        });
    }
    Ok(())
}

/// Run one suite over a tower.  Errors are reserved for resource caps and
/// invalid parameters; a *failing* check is reported, not an error.
pub fn run_suite(tower: &FieldTower, suite: Suite, table_cap: u64) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    match suite {
        Suite::Spread => run_spread(tower, &mut checks),
        Suite::Groups => {
            let shared = build_shared(tower)?;
            run_groups(tower, &shared, table_cap, &mut checks)?;
        }
        Suite::Flags => {
            let shared = build_shared(tower)?;
            run_flags(tower, &shared, &mut checks)?;
        }
        Suite::Slow => run_slow(tower, table_cap, &mut checks)?,
        Suite::All => {
            run_spread(tower, &mut checks);
            let shared = build_shared(tower)?;
            run_groups(tower, &shared, table_cap, &mut checks)?;
            run_flags(tower, &shared, &mut checks)?;
        }
    }
    Ok(VerificationReport {
        p: tower.p(),
        e: tower.e(),
        k: tower.k(),
        suite: suite.name().to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
