//! Command-line flags and their validation.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kbsc_core::conditions::{Condition, CoobsVariant, EventDomain, LegacyOptions, Shape, WorldDomain};
use kbsc_core::kripke::Relation;
use kbsc_core::oracle::MAX_SOLVE_DEPTH;

#[derive(Debug, Parser)]
#[command(
    name = "kbsc",
    version,
    about = "Decentralized supervisory control with knowledge-based conditions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide a condition and report defaults and a shortest counterexample.
    Check {
        file: PathBuf,
        #[command(flatten)]
        condition: ConditionFlags,
        #[arg(long)]
        json: bool,
    },
    /// Synthesize supervisors and write their tables to a directory.
    Synthesize {
        file: PathBuf,
        #[arg(short = 'o', long = "output")]
        output: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Compare the closed loop of stored supervisors with the legal language.
    Verify {
        file: PathBuf,
        #[arg(long)]
        supervisors: PathBuf,
        /// Length bound for the oracle cross-check.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Step through the closed loop interactively.
    Simulate {
        file: PathBuf,
        #[arg(long)]
        supervisors: Option<PathBuf>,
    },
    /// Print the plant, or the composite with `--composite`, as a DOT graph.
    ExportDot {
        file: PathBuf,
        #[arg(long)]
        composite: bool,
    },
    /// Run the brute-force oracles on a model or on seeded random instances.
    Oracle {
        file: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: OracleMode,
        #[command(flatten)]
        condition: ConditionFlags,
        /// Supervisors for `--mode solve`; synthesized when absent.
        #[arg(long)]
        supervisors: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
        /// First seed of a run over random instances.
        #[arg(long)]
        seed: Option<u64>,
        /// Number of random instances.
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Args, Clone, Copy, Default)]
pub struct ConditionFlags {
    #[arg(long, value_enum)]
    pub condition: Option<ConditionArg>,
    #[arg(long, value_enum)]
    pub relation: Option<RelationArg>,
    #[arg(long, value_enum)]
    pub worlds: Option<WorldsArg>,
    /// Event domain of the legacy condition.
    #[arg(long, value_enum)]
    pub events: Option<EventsArg>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConditionArg {
    Controllability,
    Extended,
    Corrected,
    Split,
    Legacy,
    Cp,
    Da,
    StrongCp,
    StrongDa,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RelationArg {
    Partial,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WorldsArg {
    Legal,
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EventsArg {
    All,
    Controllable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleMode {
    Condition,
    Solve,
    Search,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputMode {
    Text,
    Json,
}

impl OutputMode {
    pub fn from_flag(json: bool) -> Self {
        if json {
            OutputMode::Json
        } else {
            OutputMode::Text
        }
    }
}

/// Validated settings shared by the commands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunConfig {
    pub condition: Condition,
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    pub count: usize,
    pub output: OutputMode,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            condition: Condition::Extended,
            depth: None,
            seed: None,
            count: 1,
            output: OutputMode::Text,
        }
    }
}

fn relation(r: RelationArg) -> Relation {
    match r {
        RelationArg::Partial => Relation::Partial,
        RelationArg::Total => Relation::Total,
    }
}

fn relation_name(r: Relation) -> &'static str {
    match r {
        Relation::Partial => "partial",
        Relation::Total => "total",
    }
}

impl ConditionFlags {
    /// Resolves the flags to a condition. Only the legacy condition takes a
    /// free choice of relation, world domain and event domain; every other
    /// condition accepts the flags only when they match its fixed semantics.
    pub fn resolve(self) -> Result<Condition, String> {
        let cond = self.condition.unwrap_or(ConditionArg::Extended);
        if cond == ConditionArg::Legacy {
            let d = LegacyOptions::default();
            return Ok(Condition::Legacy(LegacyOptions {
                relation: self.relation.map_or(d.relation, relation),
                worlds: match self.worlds {
                    Some(WorldsArg::Legal) => WorldDomain::Legal,
                    Some(WorldsArg::All) => WorldDomain::All,
                    None => d.worlds,
                },
                events: match self.events {
                    Some(EventsArg::Controllable) => EventDomain::Controllable,
                    Some(EventsArg::All) => EventDomain::All,
                    None => d.events,
                },
            }));
        }
        let (condition, fixed) = match cond {
            ConditionArg::Controllability => (Condition::Controllability, None),
            ConditionArg::Extended => (Condition::Extended, Some(Relation::Partial)),
            ConditionArg::Corrected => (Condition::Corrected(Shape::Coupled), Some(Relation::Partial)),
            ConditionArg::Split => (Condition::Corrected(Shape::Split), Some(Relation::Partial)),
            ConditionArg::Cp => (Condition::Coobservability(CoobsVariant::Cp), Some(Relation::Partial)),
            ConditionArg::Da => (Condition::Coobservability(CoobsVariant::Da), Some(Relation::Partial)),
            ConditionArg::StrongCp => (
                Condition::Coobservability(CoobsVariant::StrongCp),
                Some(Relation::Total),
            ),
            ConditionArg::StrongDa => (
                Condition::Coobservability(CoobsVariant::StrongDa),
                Some(Relation::Total),
            ),
            ConditionArg::Legacy => unreachable!("handled above"),
        };
        if let Some(r) = self.relation.map(relation) {
            match fixed {
                Some(f) if f == r => {}
                Some(f) => {
                    return Err(format!(
                        "{condition} uses the {} relation; --relation {} is not allowed",
                        relation_name(f),
                        relation_name(r)
                    ))
                }
                None => return Err(format!("--relation does not apply to {condition}")),
            }
        }
        if self.worlds == Some(WorldsArg::All) || (self.worlds.is_some() && fixed.is_none()) {
            return Err(format!(
                "{condition} is evaluated at legal worlds only; use --condition legacy for --worlds"
            ));
        }
        if self.events.is_some() {
            return Err("--events only applies to --condition legacy".into());
        }
        Ok(condition)
    }
}

pub fn check_depth(depth: Option<usize>) -> Result<Option<usize>, String> {
    match depth {
        Some(0) => Err("--depth must be at least 1".into()),
        Some(k) if k > MAX_SOLVE_DEPTH => Err(format!("--depth {k} exceeds the bound {MAX_SOLVE_DEPTH}")),
        d => Ok(d),
    }
}

impl RunConfig {
    pub fn for_check(flags: ConditionFlags, json: bool) -> Result<Self, String> {
        Ok(RunConfig {
            condition: flags.resolve()?,
            output: OutputMode::from_flag(json),
            ..RunConfig::default()
        })
    }

    pub fn for_verify(depth: Option<usize>, json: bool) -> Result<Self, String> {
        Ok(RunConfig {
            depth: check_depth(depth)?,
            output: OutputMode::from_flag(json),
            ..RunConfig::default()
        })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn for_oracle(
        has_file: bool,
        mode: OracleMode,
        flags: ConditionFlags,
        has_supervisors: bool,
        depth: Option<usize>,
        seed: Option<u64>,
        count: Option<usize>,
        json: bool,
    ) -> Result<Self, String> {
        match (has_file, seed) {
            (true, Some(_)) => return Err("give either a model file or --seed, not both".into()),
            (false, None) => return Err("a model file or --seed is required".into()),
            _ => {}
        }
        if count.is_some() && seed.is_none() {
            return Err("--count requires --seed".into());
        }
        if count == Some(0) {
            return Err("--count must be at least 1".into());
        }
        if mode != OracleMode::Condition
            && (flags.condition.is_some()
                || flags.relation.is_some()
                || flags.worlds.is_some()
                || flags.events.is_some())
        {
            return Err("condition flags only apply to --mode condition".into());
        }
        if has_supervisors && (mode != OracleMode::Solve || seed.is_some()) {
            return Err("--supervisors only applies to --mode solve on a model file".into());
        }
        if depth.is_some() && mode == OracleMode::Condition {
            return Err("--depth does not apply to --mode condition".into());
        }
        Ok(RunConfig {
            condition: flags.resolve()?,
            depth: check_depth(depth)?,
            seed,
            count: count.unwrap_or(1),
            output: OutputMode::from_flag(json),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(c: ConditionArg) -> ConditionFlags {
        ConditionFlags {
            condition: Some(c),
            ..Default::default()
        }
    }

    #[test]
    fn strong_variants_force_total() {
        let mut f = flags(ConditionArg::StrongCp);
        assert!(f.resolve().is_ok());
        f.relation = Some(RelationArg::Partial);
        assert!(f.resolve().is_err());
        f.relation = Some(RelationArg::Total);
        assert_eq!(f.resolve(), Ok(Condition::Coobservability(CoobsVariant::StrongCp)));
    }

    #[test]
    fn legacy_takes_every_flag() {
        let f = ConditionFlags {
            condition: Some(ConditionArg::Legacy),
            relation: Some(RelationArg::Partial),
            worlds: Some(WorldsArg::Legal),
            events: Some(EventsArg::Controllable),
        };
        assert_eq!(
            f.resolve(),
            Ok(Condition::Legacy(LegacyOptions {
                relation: Relation::Partial,
                worlds: WorldDomain::Legal,
                events: EventDomain::Controllable,
            }))
        );
        assert_eq!(
            flags(ConditionArg::Legacy).resolve(),
            Ok(Condition::Legacy(LegacyOptions::default()))
        );
    }

    #[test]
    fn fixed_conditions_reject_other_flags() {
        let mut f = flags(ConditionArg::Extended);
        f.worlds = Some(WorldsArg::All);
        assert!(f.resolve().is_err());
        let mut f = flags(ConditionArg::Corrected);
        f.events = Some(EventsArg::All);
        assert!(f.resolve().is_err());
        let mut f = flags(ConditionArg::Controllability);
        f.relation = Some(RelationArg::Partial);
        assert!(f.resolve().is_err());
        assert_eq!(ConditionFlags::default().resolve(), Ok(Condition::Extended));
    }

    #[test]
    fn oracle_inputs() {
        let f = ConditionFlags::default();
        assert!(RunConfig::for_oracle(true, OracleMode::Condition, f, false, None, Some(1), None, false).is_err());
        assert!(RunConfig::for_oracle(false, OracleMode::Condition, f, false, None, None, None, false).is_err());
        assert!(RunConfig::for_oracle(true, OracleMode::Solve, f, false, Some(11), None, None, false).is_err());
        assert!(RunConfig::for_oracle(true, OracleMode::Condition, f, false, None, None, Some(3), false).is_err());
        let c = RunConfig::for_oracle(false, OracleMode::Search, f, false, Some(4), Some(7), Some(3), true).unwrap();
        assert_eq!(
            (c.seed, c.count, c.depth, c.output),
            (Some(7), 3, Some(4), OutputMode::Json)
        );
    }
}
