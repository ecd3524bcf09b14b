//! Seeded generators for the park sensor log and the retail sales fixtures.
//!
//! Both produce CSV text with a schema sidecar, so the generated data goes
//! through the same ingestion path as files on disk. Output depends only on
//! the seed.

use chrono::{Datelike, Duration, NaiveDate, NaiveDateTime, Timelike};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{load_csv_with, AttrType, Attribute, DataError, LoadOptions, SchemaFile, Table};

pub const DATE_FORMAT: &str = "%Y-%m-%d %H:%M:%S";

/// Generated CSV with its sidecar.
#[derive(Debug, Clone)]
pub struct Synthetic {
    pub csv: String,
    pub schema: SchemaFile,
}

impl Synthetic {
    pub fn table(&self) -> Result<Table, DataError> {
        load_csv_with(&self.csv, &self.schema, LoadOptions::default())
    }

    pub fn schema_json(&self) -> String {
        serde_json::to_string_pretty(&self.schema).expect("schema serializes") + "\n"
    }
}

fn attr(name: &str, ty: AttrType) -> Attribute {
    Attribute { name: name.to_string(), ty }
}

pub fn season(month: u32) -> &'static str {
    match month {
        3..=5 => "Spring",
        6..=8 => "Summer",
        9..=11 => "Fall",
        _ => "Winter",
    }
}

#[derive(Debug, Clone)]
pub struct VastOptions {
    pub cars: usize,
    /// Cars that enter through an entrance gate and never leave.
    pub stranded: usize,
    /// Non-ranger cars that pass through ranger gates.
    pub trespassers: usize,
    pub seed: u64,
}

impl Default for VastOptions {
    fn default() -> Self {
        VastOptions { cars: 200, stranded: 3, trespassers: 2, seed: 2017 }
    }
}

/// A park sensor log and the car ids with an odd number of entrance check-ins.
#[derive(Debug, Clone)]
pub struct VastLog {
    pub data: Synthetic,
    pub stranded: Vec<u64>,
    pub trespassers: Vec<u64>,
}

const ENTRANCES: usize = 5;
const CAMPING: usize = 9;
const GENERAL: usize = 8;
const RANGER_STOPS: usize = 7;
const VISITOR_TYPES: &[&str] = &["car", "truck", "bus", "camper", "motorcycle"];

/// Check-ins of cars driving through a park. Every visitor enters and exits
/// through an entrance gate except `stranded` planted cars, which never
/// exit. Ranger cars start and end at the ranger base and never use an
/// entrance, so their count stays even (zero).
pub fn vast(opts: &VastOptions) -> VastLog {
    assert!(opts.stranded + opts.trespassers <= opts.cars, "more planted cars than cars");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let ids: Vec<u64> = (0..opts.cars as u64).map(|i| 1000 + i * 7).collect();
    let rangers = (opts.cars / 10).max(1).min(opts.cars - opts.stranded - opts.trespassers);
    let mut order: Vec<usize> = (0..opts.cars).collect();
    order.shuffle(&mut rng);
    let ranger_set = &order[..rangers];
    let stranded_set = &order[rangers..rangers + opts.stranded];
    let tres_set = &order[rangers + opts.stranded..rangers + opts.stranded + opts.trespassers];

    let start = NaiveDate::from_ymd_opt(2015, 5, 1).unwrap().and_hms_opt(0, 0, 0).unwrap();
    let mut rows: Vec<(NaiveDateTime, u64, &str, String, f64)> = Vec::new();
    for (i, &id) in ids.iter().enumerate() {
        let ranger = ranger_set.contains(&i);
        let kind = if ranger { "ranger" } else { *VISITOR_TYPES.choose(&mut rng).unwrap() };
        let mut t = start + Duration::minutes(rng.random_range(0..365 * 24 * 60));
        let mut gates = Vec::new();
        let entrance = format!("entrance{}", rng.random_range(0..ENTRANCES));
        if ranger {
            gates.push("ranger-base".to_string());
        } else {
            gates.push(entrance.clone());
        }
        for _ in 0..rng.random_range(1..=4) {
            let g = match rng.random_range(0..3) {
                0 if ranger => format!("ranger-stop{}", rng.random_range(0..RANGER_STOPS)),
                0 | 1 => format!("general-gate{}", rng.random_range(0..GENERAL)),
                _ => format!("camping{}", rng.random_range(0..CAMPING)),
            };
            gates.push(g);
        }
        if tres_set.contains(&i) {
            let at = rng.random_range(1..gates.len());
            gates.insert(at, format!("ranger-stop{}", rng.random_range(0..RANGER_STOPS)));
        }
        if ranger {
            gates.push("ranger-base".to_string());
        } else if !stranded_set.contains(&i) {
            gates.push(format!("entrance{}", rng.random_range(0..ENTRANCES)));
        }
        for g in gates {
            let night = t.hour() < 7;
            let base: f64 = if night { 55.0 } else { 35.0 };
            let speed = (base + rng.random_range(-10.0..10.0_f64)).round();
            rows.push((t, id, kind, g, speed));
            t += Duration::minutes(rng.random_range(20..240));
        }
    }
    rows.sort_by_key(|r| (r.0, r.1));

    let mut csv = String::from("Timestamp,Car-id,Car-type,Gate-name,Hour,Season,Speed\n");
    for (t, id, kind, gate, speed) in &rows {
        csv.push_str(&format!(
            "{},{id},{kind},{gate},{},{},{speed}\n",
            t.format(DATE_FORMAT),
            t.hour(),
            season(t.month())
        ));
    }
    let schema = SchemaFile {
        attrs: vec![
            attr("Timestamp", AttrType::Date),
            attr("Car-id", AttrType::Number),
            attr("Car-type", AttrType::String),
            attr("Gate-name", AttrType::String),
            attr("Hour", AttrType::Number),
            attr("Season", AttrType::String),
            attr("Speed", AttrType::Number),
        ],
        date_format: Some(DATE_FORMAT.to_string()),
        synthesize_id: true,
    };
    let mut stranded: Vec<u64> = stranded_set.iter().map(|&i| ids[i]).collect();
    stranded.sort_unstable();
    let mut trespassers: Vec<u64> = tres_set.iter().map(|&i| ids[i]).collect();
    trespassers.sort_unstable();
    VastLog { data: Synthetic { csv, schema }, stranded, trespassers }
}

pub const M5_STATES: &[&str] = &["California", "Texas", "Wisconsin", "Maryland", "New York", "Utah"];
const M5_DEPTS: &[(&str, &str)] = &[("Clothing", "Apparel"), ("Bathroom", "Household"), ("Foods", "Grocery"), ("Hobbies", "Leisure")];
const M5_EVENTS: &[(&str, &str, u32, u32)] = &[
    ("New Years Day", "National", 1, 1),
    ("Valentines Day", "Cultural", 2, 14),
    ("Easter", "Religious", 4, 5),
    ("Independence Day", "National", 7, 4),
    ("Black Friday", "Cultural", 11, 27),
    ("Christmas", "Religious", 12, 25),
];

/// Daily unit sales of a handful of items across states. Rows without a
/// holiday carry the event `SNAP` on benefit days and `none` otherwise.
pub fn m5(seed: u64, days: usize) -> Synthetic {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = NaiveDate::from_ymd_opt(2015, 1, 1).unwrap();
    let snap_states: Vec<bool> = M5_STATES.iter().map(|_| rng.random_bool(0.7)).collect();
    let items: Vec<(String, usize, f64)> = (0..8)
        .map(|i| {
            let d = i % M5_DEPTS.len();
            (format!("ITEM_{:03}", i + 1), d, (rng.random_range(1.0..30.0_f64) * 100.0).round() / 100.0)
        })
        .collect();
    let mut csv = String::from("Date,Item,Dept,Categ,Store,State,Event,Event-type,SNAP,Price,Sales,Season\n");
    for day in 0..days {
        let date = start + Duration::days(day as i64 * 3);
        let event = M5_EVENTS.iter().find(|e| e.2 == date.month() && e.3 == date.day());
        for (s, state) in M5_STATES.iter().enumerate() {
            let snap = snap_states[s];
            let (ev, ev_type) = match event {
                Some(e) => (e.0, e.1),
                None if snap && date.day() <= 10 => ("SNAP", "Benefit"),
                None => ("none", "none"),
            };
            let (item, d, price) = items.choose(&mut rng).unwrap();
            let (dept, categ) = M5_DEPTS[*d];
            let boost = match ev {
                "Black Friday" => 3.0,
                "New Years Day" => 0.4,
                "SNAP" => 1.3,
                _ => 1.0,
            };
            let sales = ((rng.random_range(5.0..60.0_f64) * boost) / (1.0 + price / 20.0)).round();
            csv.push_str(&format!(
                "{} 00:00:00,{item},{dept},{categ},{}_{},{state},{ev},{ev_type},{snap},{price},{sales},{}\n",
                date.format("%Y-%m-%d"),
                state[..2].to_uppercase(),
                s + 1,
                season(date.month())
            ));
        }
    }
    let schema = SchemaFile {
        attrs: vec![
            attr("Date", AttrType::Date),
            attr("Item", AttrType::String),
            attr("Dept", AttrType::String),
            attr("Categ", AttrType::String),
            attr("Store", AttrType::String),
            attr("State", AttrType::String),
            attr("Event", AttrType::String),
            attr("Event-type", AttrType::String),
            attr("SNAP", AttrType::Boolean),
            attr("Price", AttrType::Number),
            attr("Sales", AttrType::Number),
            attr("Season", AttrType::String),
        ],
        date_format: Some(DATE_FORMAT.to_string()),
        synthesize_id: true,
    };
    Synthetic { csv, schema }
}
