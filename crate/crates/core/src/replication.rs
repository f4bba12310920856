//! Desk replication data: the five-by-five balanced-stream case with two hot
//! utilities and one cold utility, split into three subnetworks by load.
//!
//! Published hot supply (2312 kW) falls 2 kW short of cold demand (2314 kW).
//! [`SlackMode`] picks how the gap is closed.

use serde::Serialize;

use crate::model::{ExplicitInterval, HensInstance, Side, Stream, Utility};
use crate::{Instance, Rational, Scalar};

/// Gap between published cold demand and hot supply, kW.
pub const TABLE2_SLACK: i64 = 2;

pub const HOT_FCP: [&str; 5] = ["1", "2", "1.5", "1.7", "2.5"];
pub const COLD_FCP: [&str; 5] = ["1.3", "1.5", "1.9", "2.5", "2.8"];
pub const HOT_LOADS: [i64; 5] = [280, 440, 345, 442, 500];
pub const COLD_LOADS: [i64; 5] = [195, 360, 570, 625, 504];
pub const HOT_UTILITY_DUTIES: [i64; 2] = [110, 195];
pub const COLD_UTILITY_DUTY: i64 = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlackMode {
    /// The missing 2 kW enter the second subnetwork as residual heat of H4,
    /// as if cascaded from above the studied range.
    #[default]
    EnteringResidual,
    /// The cold utility duty drops to 58 kW; H1 and H3 shift 1 kW each
    /// from the third subnetwork to the second.
    ScaleColdUtility,
}

impl SlackMode {
    pub fn describe(self) -> &'static str {
        match self {
            SlackMode::EnteringResidual => "2 kW slack enters subnetwork 2 as residual of H4",
            SlackMode::ScaleColdUtility => "cold utility duty scaled from 60 kW to 58 kW",
        }
    }
}

fn r(v: i64) -> Rational {
    Rational::from_int(v)
}

fn streams() -> Vec<Stream<Rational>> {
    let make = |side: Side, k: usize, fcp: &str, load: i64| Stream {
        id: format!("{}{}", if side == Side::Hot { "H" } else { "C" }, k + 1),
        side,
        fcp: Rational::parse_decimal(fcp).expect("constant parses"),
        t_in: None,
        t_out: None,
        load: Some(r(load)),
    };
    let hot = HOT_FCP.iter().zip(HOT_LOADS).enumerate().map(|(k, (f, q))| make(Side::Hot, k, f, q));
    let cold = COLD_FCP.iter().zip(COLD_LOADS).enumerate().map(|(k, (f, q))| make(Side::Cold, k, f, q));
    hot.chain(cold).collect()
}

fn utilities(cold_duty: i64) -> Vec<Utility<Rational>> {
    vec![
        Utility::new("HU1", Side::Hot, None, Some(r(HOT_UTILITY_DUTIES[0]))),
        Utility::new("HU2", Side::Hot, None, Some(r(HOT_UTILITY_DUTIES[1]))),
        Utility::new("CU", Side::Cold, None, Some(r(cold_duty))),
    ]
}

fn loads(items: &[(&str, i64)]) -> Vec<(String, Rational)> {
    items.iter().map(|(id, q)| (id.to_string(), r(*q))).collect()
}

fn interval(name: &str, hot: &[(&str, i64)], cold: &[(&str, i64)], entering: &[(&str, i64)]) -> ExplicitInterval<Rational> {
    ExplicitInterval {
        name: name.to_string(),
        delta_t: None,
        hot: loads(hot),
        cold: loads(cold),
        entering: loads(entering),
    }
}

/// The case as three subnetworks with explicit loads. Subnetwork 3 holds
/// H1 and H3 with equal loads against C1 and CU with equal loads.
pub fn table2_instance(mode: SlackMode) -> Instance {
    let (cold_duty, h1, h3, tail, entering) = match mode {
        SlackMode::EnteringResidual => (COLD_UTILITY_DUTY, 60, 60, 60, TABLE2_SLACK),
        SlackMode::ScaleColdUtility => (COLD_UTILITY_DUTY - TABLE2_SLACK, 59, 59, 58, 0),
    };
    let entering_list: Vec<(&str, i64)> = if entering > 0 { vec![("H4", entering)] } else { vec![] };
    let mut inst = HensInstance::new(streams(), utilities(cold_duty));
    inst.name = Some(format!("table2-{}", slack_tag(mode)));
    inst.intervals = vec![
        interval(
            "sub1",
            &[("H2", 440), ("H5", 500), ("HU1", 110), ("HU2", 195)],
            &[("C3", 570), ("C4", 625), ("C5", 50)],
            &[],
        ),
        interval(
            "sub2",
            &[("H1", 280 - h1), ("H3", 345 - h3), ("H4", 442)],
            &[("C1", 135), ("C2", 360), ("C5", 454)],
            &entering_list,
        ),
        interval("sub3", &[("H1", h1), ("H3", h3)], &[("C1", 60), ("CU", tail)], &[]),
    ];
    inst
}

/// All published loads in a single interval.
pub fn table2_aggregate(mode: SlackMode) -> Instance {
    let cold_duty = match mode {
        SlackMode::EnteringResidual => COLD_UTILITY_DUTY,
        SlackMode::ScaleColdUtility => COLD_UTILITY_DUTY - TABLE2_SLACK,
    };
    let mut hot: Vec<(String, Rational)> = (0..5).map(|k| (format!("H{}", k + 1), r(HOT_LOADS[k]))).collect();
    hot.push(("HU1".into(), r(HOT_UTILITY_DUTIES[0])));
    hot.push(("HU2".into(), r(HOT_UTILITY_DUTIES[1])));
    let mut cold: Vec<(String, Rational)> = (0..5).map(|k| (format!("C{}", k + 1), r(COLD_LOADS[k]))).collect();
    cold.push(("CU".into(), r(cold_duty)));
    let entering = match mode {
        SlackMode::EnteringResidual => vec![("H4".to_string(), r(TABLE2_SLACK))],
        SlackMode::ScaleColdUtility => vec![],
    };
    let mut inst = HensInstance::new(streams(), utilities(cold_duty));
    inst.name = Some(format!("table2-aggregate-{}", slack_tag(mode)));
    inst.intervals = vec![ExplicitInterval {
        name: "all".into(),
        delta_t: None,
        hot,
        cold,
        entering,
    }];
    inst
}

fn slack_tag(mode: SlackMode) -> &'static str {
    match mode {
        SlackMode::EnteringResidual => "entering-residual",
        SlackMode::ScaleColdUtility => "scale-cold-utility",
    }
}
