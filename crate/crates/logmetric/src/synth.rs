//! Synthetic host-log corpus generator.
//!
//! Emits raw nested JSON documents resembling New Process event logs from a
//! small fleet: seven hosts in three user roles (administrators, IT,
//! researchers), each with role-typical and host-specific background
//! activity, plus ransomware-style attack sequences implanted into the first
//! few hosts. Attack instances are polymorphic: the dropped file names are
//! randomized per instance, so exact matching fails while the log metric
//! keeps instances close.
//!
//! The corpus ships with its ground truth (host roles and implant positions)
//! so detection and classification runs can be scored.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::schema::{AttributeSpec, Derivation, DomainKind, SchemaConfig};

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub seed: u64,
    pub hosts: usize,
    /// Host-days in total, spread as evenly as possible across hosts.
    pub total_days: usize,
    /// Mean ambient entries per host-day.
    pub entries_per_day: usize,
    /// How many hosts get one implanted attack sequence each.
    pub attacks: usize,
    /// Non-process records per host-day; they carry none of the schema keys
    /// and exercise the discard path.
    pub junk_per_day: usize,
    /// Records with corrupt timestamps across the whole corpus; they
    /// exercise the rejection diagnostics.
    pub bad_time_records: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 0,
            hosts: 7,
            total_days: 61,
            entries_per_day: 260,
            attacks: 4,
            junk_per_day: 5,
            bad_time_records: 3,
        }
    }
}

/// Where one implanted attack sequence sits in its host's stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackTruth {
    pub host: String,
    /// Index of the first attack entry in the host's standardized,
    /// time-sorted stream.
    pub start_index: usize,
    pub entry_count: usize,
    pub start_time: f64,
    pub end_time: f64,
    /// The randomized file stem this instance dropped.
    pub marker: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    /// `(host, role)` pairs in host order.
    pub roles: Vec<(String, String)>,
    pub attacks: Vec<AttackTruth>,
}

/// A generated corpus: raw documents in arrival (time) order plus the schema
/// config they are meant to be ingested under and the ground truth.
#[derive(Debug, Clone)]
pub struct SynthCorpus {
    pub documents: Vec<Value>,
    pub schema_config: SchemaConfig,
    pub truth: GroundTruth,
}

/// The five-attribute schema the corpus is built for: derived base name and
/// extension of the new process, the creator process, the token elevation,
/// and the command line.
pub fn schema_config() -> SchemaConfig {
    let attr = |name: &str, domain, source: &str, derivation| AttributeSpec {
        name: name.to_string(),
        domain,
        source_key: Some(source.to_string()),
        derivation,
    };
    SchemaConfig {
        attributes: vec![
            attr(
                "BaseFileName",
                DomainKind::Categorical,
                "EventData.NewProcessName",
                Some(Derivation::PathBasename),
            ),
            attr(
                "BaseFileExtn",
                DomainKind::Categorical,
                "EventData.NewProcessName",
                Some(Derivation::PathExtension),
            ),
            attr(
                "CreatorProc",
                DomainKind::Categorical,
                "EventData.CreatorProcessName",
                None,
            ),
            attr(
                "TokenElevation",
                DomainKind::Numerical,
                "EventData.TokenElevationType",
                None,
            ),
            attr("CmdLine", DomainKind::String, "EventData.CommandLine", None),
        ],
        time_key: "System.TimeCreated".to_string(),
        host_key: Some("System.Computer".to_string()),
        fitted: None,
    }
}

/// The schema with the command line dropped, as the stream-comparison
/// experiments use.
pub fn classification_schema_config() -> SchemaConfig {
    let mut config = schema_config();
    config.attributes.retain(|a| a.name != "CmdLine");
    config
}

const ROLES: [&str; 7] = [
    "admin",
    "admin",
    "admin",
    "it",
    "researcher",
    "researcher",
    "researcher",
];

/// 2015-11-02T00:00:00Z; the corpus spans the following days.
const EPOCH: f64 = 1_446_422_400.0;
const DAY: f64 = 86_400.0;

#[derive(Debug, Clone, Copy)]
enum TimeProfile {
    /// Uniform over the day.
    Any,
    /// Business hours, 09:00-17:00.
    Business,
    /// One of the four-hourly service slots.
    Periodic,
    /// The 08:00 login window.
    Login,
}

#[derive(Debug, Clone, Copy)]
enum CmdKind {
    None,
    Fixed(&'static str),
    /// `"<program> C:\Users\<host>\<dir>\<stem><nnn>.<ext>"`.
    UserDoc {
        program: &'static str,
        dir: &'static str,
        stem: &'static str,
        ext: &'static str,
    },
}

struct Template {
    creator: &'static str,
    process: &'static str,
    cmd: CmdKind,
    token: f64,
    profile: TimeProfile,
    /// Base weights by role: [admin, it, researcher].
    weight: [f64; 3],
}

const TEMPLATES: &[Template] = &[
    Template {
        creator: "userinit",
        process: r"C:\Windows\explorer.exe",
        cmd: CmdKind::Fixed(r"C:\Windows\explorer.exe"),
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [4.0, 4.0, 4.0],
    },
    Template {
        creator: "explorer",
        process: r"C:\Windows\explorer.exe",
        cmd: CmdKind::Fixed(r"C:\Windows\Explorer.exe"),
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [5.0, 5.0, 5.0],
    },
    Template {
        creator: "services",
        process: r"C:\Windows\System32\policyHost.exe",
        cmd: CmdKind::None,
        token: 1.0,
        profile: TimeProfile::Periodic,
        weight: [10.0, 10.0, 10.0],
    },
    Template {
        creator: "ngentask",
        process: r"C:\Windows\Microsoft.NET\Framework64\v4.0.30319\ngen.exe",
        cmd: CmdKind::Fixed("ngen.exe ExecuteQueuedItems"),
        token: 1.0,
        profile: TimeProfile::Login,
        weight: [8.0, 8.0, 8.0],
    },
    Template {
        creator: "services",
        process: r"C:\Windows\System32\svchost.exe",
        cmd: CmdKind::Fixed(r"C:\Windows\System32\svchost.exe -k netsvcs"),
        token: 1.0,
        profile: TimeProfile::Any,
        weight: [12.0, 12.0, 12.0],
    },
    Template {
        creator: "cmd",
        process: r"C:\Windows\System32\conhost.exe",
        cmd: CmdKind::Fixed(r"\??\C:\Windows\system32\conhost.exe 0x4"),
        token: 1.0,
        profile: TimeProfile::Any,
        weight: [5.0, 5.0, 5.0],
    },
    // The legitimate Flash updater: the attack vector log also appears in
    // ambient data, so context has to carry the detection.
    Template {
        creator: "svchost",
        process: r"C:\Windows\system32\Macromed\Flash\FlashUtil64_19_0_0_185_ActiveX.exe",
        cmd: CmdKind::Fixed(
            r"C:\Windows\system32\Macromed\Flash\FlashUtil64_19_0_0_185_ActiveX.exe -Embedding",
        ),
        token: 3.0,
        profile: TimeProfile::Any,
        weight: [1.0, 1.0, 1.0],
    },
    Template {
        creator: "explorer",
        process: r"C:\Program Files\Google\Chrome\Application\chrome.exe",
        cmd: CmdKind::Fixed("chrome.exe --type=renderer --lang=en-US"),
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [6.0, 3.0, 6.0],
    },
    Template {
        creator: "explorer",
        process: r"C:\Program Files\Microsoft Office\Office15\OUTLOOK.EXE",
        cmd: CmdKind::Fixed("OUTLOOK.EXE /recycle"),
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [14.0, 2.0, 2.0],
    },
    Template {
        creator: "explorer",
        process: r"C:\Program Files\Microsoft Office\Office15\WINWORD.EXE",
        cmd: CmdKind::UserDoc {
            program: "WINWORD.EXE",
            dir: "Documents",
            stem: "report",
            ext: "docx",
        },
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [10.0, 1.0, 3.0],
    },
    Template {
        creator: "explorer",
        process: r"C:\Program Files\Microsoft Office\Office15\EXCEL.EXE",
        cmd: CmdKind::UserDoc {
            program: "EXCEL.EXE",
            dir: "Documents",
            stem: "ledger",
            ext: "xlsx",
        },
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [8.0, 1.0, 2.0],
    },
    Template {
        creator: "services",
        process: r"C:\Windows\System32\WindowsPowerShell\v1.0\powershell.exe",
        cmd: CmdKind::Fixed(
            r"powershell.exe -NoProfile -ExecutionPolicy Bypass -File C:\Scripts\inventory.ps1",
        ),
        token: 1.0,
        profile: TimeProfile::Any,
        weight: [2.0, 16.0, 2.0],
    },
    Template {
        creator: "explorer",
        process: r"C:\Windows\System32\cmd.exe",
        cmd: CmdKind::Fixed("cmd.exe /c ipconfig /all"),
        token: 1.0,
        profile: TimeProfile::Business,
        weight: [2.0, 10.0, 2.0],
    },
    Template {
        creator: "explorer",
        process: r"C:\Windows\System32\mmc.exe",
        cmd: CmdKind::Fixed("mmc.exe compmgmt.msc"),
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [1.0, 7.0, 1.0],
    },
    Template {
        creator: "cmd",
        process: r"C:\Python27\python.exe",
        cmd: CmdKind::UserDoc {
            program: "python.exe",
            dir: "experiments",
            stem: "run",
            ext: "py",
        },
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [1.0, 1.0, 15.0],
    },
    Template {
        creator: "explorer",
        process: r"C:\Program Files\MATLAB\R2015a\bin\matlab.exe",
        cmd: CmdKind::Fixed("matlab.exe -nosplash"),
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [0.5, 0.5, 8.0],
    },
    Template {
        creator: "acrobat",
        process: r"C:\Program Files\Adobe\Acrobat\AcroCEF.exe",
        cmd: CmdKind::Fixed("AcroCEF.exe --type=renderer"),
        token: 3.0,
        profile: TimeProfile::Business,
        weight: [1.0, 1.0, 9.0],
    },
];

/// Weight of the per-host tool process, the main host-level fingerprint.
const HOST_TOOL_WEIGHT: f64 = 9.0;

fn role_index(role: &str) -> usize {
    match role {
        "admin" => 0,
        "it" => 1,
        _ => 2,
    }
}

/// One record of the corpus before serialization.
struct Record {
    host: String,
    time: f64,
    kind: RecordKind,
}

enum RecordKind {
    Process {
        creator: String,
        process: String,
        cmdline: Option<String>,
        token: f64,
    },
    /// A non-process record; carries none of the schema keys.
    Junk,
    /// A process record whose timestamp will be written corrupt.
    BadTime,
}

impl Record {
    fn is_good(&self) -> bool {
        matches!(self.kind, RecordKind::Process { .. })
    }

    fn to_document(&self) -> Value {
        match &self.kind {
            RecordKind::Process {
                creator,
                process,
                cmdline,
                token,
            } => {
                let mut event_data = serde_json::Map::new();
                event_data.insert("NewProcessName".into(), json!(process));
                event_data.insert("CreatorProcessName".into(), json!(creator));
                event_data.insert("TokenElevationType".into(), json!(token));
                if let Some(cmd) = cmdline {
                    event_data.insert("CommandLine".into(), json!(cmd));
                }
                json!({
                    "System": {
                        "Computer": self.host,
                        "TimeCreated": self.time,
                        "EventID": 4688,
                        "Channel": "Security",
                    },
                    "EventData": Value::Object(event_data),
                })
            }
            RecordKind::Junk => json!({
                "System": {
                    "Computer": self.host,
                    "TimeCreated": self.time,
                    "EventID": 4624,
                    "Channel": "Security",
                },
                "EventData": {
                    "LogonType": 2,
                    "TargetUserName": self.host,
                },
            }),
            RecordKind::BadTime => json!({
                "System": {
                    "Computer": self.host,
                    "TimeCreated": "not-a-timestamp",
                    "EventID": 4688,
                    "Channel": "Security",
                },
                "EventData": {
                    "NewProcessName": r"C:\Windows\System32\svchost.exe",
                    "CreatorProcessName": "services",
                    "TokenElevationType": 1,
                },
            }),
        }
    }
}

fn draw_time(profile: TimeProfile, day_start: f64, rng: &mut ChaCha8Rng) -> f64 {
    match profile {
        TimeProfile::Any => day_start + rng.random_range(0.0..DAY),
        TimeProfile::Business => day_start + rng.random_range(9.0 * 3600.0..17.0 * 3600.0),
        TimeProfile::Periodic => {
            let slot = [2.0, 6.0, 10.0, 14.0, 18.0, 22.0][rng.random_range(0..6)];
            day_start + slot * 3600.0 + rng.random_range(0.0..1200.0)
        }
        TimeProfile::Login => day_start + 8.0 * 3600.0 + rng.random_range(0.0..1800.0),
    }
}

fn random_stem(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(3..=4);
    const HEX: [char; 16] = [
        '0', '1', '2', '3', '4', '5', '6', '7', '8', '9', 'A', 'B', 'C', 'D', 'E', 'F',
    ];
    (0..len).map(|_| HEX[rng.random_range(0..16)]).collect()
}

/// The seven-step ransomware sequence: Flash updater vector, dropped
/// temporary file with a random name, the dropper spawning system processes
/// to destroy recovery data, and a second randomized executable landing in
/// the roaming profile.
fn attack_sequence(
    host: &str,
    marker: &str,
    marker2: &str,
    start: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Record> {
    let tmp_path = format!(r"C:\Users\{host}\AppData\Local\Temp\Low\{marker}.tmp");
    let roaming = format!(r"C:\Users\{host}\AppData\Roaming\{marker2}.exe");
    let steps: Vec<(String, String, Option<String>, f64)> =
        vec![
        (
            "svchost".into(),
            r"C:\Windows\system32\Macromed\Flash\FlashUtil64_19_0_0_185_ActiveX.exe".into(),
            Some(
                r"C:\Windows\system32\Macromed\Flash\FlashUtil64_19_0_0_185_ActiveX.exe -Embedding"
                    .into(),
            ),
            3.0,
        ),
        ("iexplore".into(), tmp_path.clone(), Some(tmp_path.clone()), 3.0),
        (marker.into(), r"C:\Windows\SysWOW64\explorer.exe".into(), None, 3.0),
        (
            "explorer".into(),
            r"C:\Windows\System32\vssadmin.exe".into(),
            Some("vssadmin delete shadows /all /quiet".into()),
            1.0,
        ),
        (
            marker.into(),
            r"C:\Windows\System32\cmd.exe".into(),
            Some(format!("cmd /c start {marker2}.exe")),
            1.0,
        ),
        (
            "cmd".into(),
            r"C:\Windows\System32\bcdedit.exe".into(),
            Some("bcdedit /set {default} recoveryenabled no".into()),
            1.0,
        ),
        (marker.into(), roaming.clone(), Some(roaming), 3.0),
    ];
    let mut t = start;
    steps
        .into_iter()
        .enumerate()
        .map(|(i, (creator, process, cmdline, token))| {
            if i > 0 {
                t += rng.random_range(6.0..7.33);
            }
            Record {
                host: host.to_string(),
                time: t,
                kind: RecordKind::Process {
                    creator,
                    process,
                    cmdline,
                    token,
                },
            }
        })
        .collect()
}

/// Generate a corpus. Deterministic for a fixed config.
pub fn generate(config: &SynthConfig) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let hosts: Vec<String> = (1..=config.hosts).map(|i| format!("host{i}")).collect();
    let roles: Vec<&str> = (0..config.hosts).map(|i| ROLES[i % ROLES.len()]).collect();

    let base_days = config.total_days / config.hosts;
    let extra = config.total_days % config.hosts;

    let mut records: Vec<Record> = Vec::new();
    let mut attacks: Vec<AttackTruth> = Vec::new();

    for (h, host) in hosts.iter().enumerate() {
        let days = base_days + usize::from(h < extra);
        let role = role_index(roles[h]);

        // Host fingerprint: stable weight perturbations plus one dedicated
        // tool process.
        let perturbation: Vec<f64> = (0..TEMPLATES.len())
            .map(|_| (rng.random_range(-0.25..0.25f64)).exp())
            .collect();
        let tool = format!(r"C:\Tools\agent{n}\hosttool{n}.exe", n = h + 1);

        let attack_day = (h < config.attacks).then_some(days / 2);
        let mut host_records: Vec<Record> = Vec::new();

        for day in 0..days {
            let day_start = EPOCH + day as f64 * DAY;

            // Attack implant first, so ambient draws can avoid its window.
            let mut carve: Option<(f64, f64)> = None;
            if attack_day == Some(day) {
                let marker = random_stem(&mut rng);
                let marker2 = random_stem(&mut rng);
                let start = day_start + 13.0 * 3600.0 + rng.random_range(0.0..3600.0);
                let sequence = attack_sequence(host, &marker, &marker2, start, &mut rng);
                let end = sequence.last().unwrap().time;
                carve = Some((start - 5.0, end + 5.0));
                attacks.push(AttackTruth {
                    host: host.clone(),
                    start_index: 0, // fixed up below
                    entry_count: sequence.len(),
                    start_time: start,
                    end_time: end,
                    marker,
                });
                host_records.extend(sequence);
            }

            // Ambient activity.
            let jitter: Vec<f64> = (0..=TEMPLATES.len())
                .map(|_| (rng.random_range(-0.15..0.15f64)).exp())
                .collect();
            let mut weights: Vec<f64> = TEMPLATES
                .iter()
                .enumerate()
                .map(|(t, template)| template.weight[role] * perturbation[t] * jitter[t])
                .collect();
            weights.push(HOST_TOOL_WEIGHT * jitter[TEMPLATES.len()]);
            let total: f64 = weights.iter().sum();

            let count = config.entries_per_day + rng.random_range(0..=config.entries_per_day / 10);
            for _ in 0..count {
                let r = rng.random::<f64>() * total;
                let mut acc = 0.0;
                let mut pick = weights.len() - 1;
                for (i, &w) in weights.iter().enumerate() {
                    acc += w;
                    if r < acc {
                        pick = i;
                        break;
                    }
                }
                let (creator, process, cmdline, token, profile) = if pick < TEMPLATES.len() {
                    let t = &TEMPLATES[pick];
                    let cmdline = match t.cmd {
                        CmdKind::None => None,
                        CmdKind::Fixed(c) => Some(c.to_string()),
                        CmdKind::UserDoc {
                            program,
                            dir,
                            stem,
                            ext,
                        } => Some(format!(
                            r"{program} C:\Users\{host}\{dir}\{stem}{n:03}.{ext}",
                            n = rng.random_range(0..400)
                        )),
                    };
                    (
                        t.creator.to_string(),
                        t.process.to_string(),
                        cmdline,
                        t.token,
                        t.profile,
                    )
                } else {
                    (
                        "explorer".to_string(),
                        tool.clone(),
                        Some(tool.clone()),
                        3.0,
                        TimeProfile::Business,
                    )
                };
                let mut time = draw_time(profile, day_start, &mut rng);
                if let Some((lo, hi)) = carve {
                    while time >= lo && time <= hi {
                        time = draw_time(profile, day_start, &mut rng);
                    }
                }
                host_records.push(Record {
                    host: host.clone(),
                    time,
                    kind: RecordKind::Process {
                        creator,
                        process,
                        cmdline,
                        token,
                    },
                });
            }

            for _ in 0..config.junk_per_day {
                host_records.push(Record {
                    host: host.clone(),
                    time: draw_time(TimeProfile::Any, day_start, &mut rng),
                    kind: RecordKind::Junk,
                });
            }
        }

        // Unique, ordered times within the host; the standardized stream
        // order must be reproducible from timestamps alone.
        host_records.sort_by(|a, b| a.time.total_cmp(&b.time));
        let mut prev = f64::NEG_INFINITY;
        for record in &mut host_records {
            if record.time <= prev {
                record.time = prev + 1e-3;
            }
            prev = record.time;
        }

        // Resolve this host's attack index among its good records.
        if let Some(truth) = attacks.iter_mut().find(|a| a.host == *host) {
            // Times shifted by deduplication; re-read them from the records.
            let start = host_records
                .iter()
                .filter(|r| r.is_good())
                .position(|r| {
                    matches!(&r.kind, RecordKind::Process { creator, .. } if creator == "svchost")
                        && (r.time - truth.start_time).abs() < 1.0
                        && r.time >= truth.start_time - 1e-6
                })
                .expect("implanted sequence present");
            truth.start_index = start;
            let goods: Vec<&Record> = host_records.iter().filter(|r| r.is_good()).collect();
            truth.start_time = goods[start].time;
            truth.end_time = goods[start + truth.entry_count - 1].time;
        }

        records.extend(host_records);
    }

    // A few corrupt-timestamp records sprinkled over the corpus.
    for i in 0..config.bad_time_records {
        let host = hosts[i % hosts.len()].clone();
        records.push(Record {
            host,
            time: EPOCH + rng.random_range(0.0..base_days.max(1) as f64 * DAY),
            kind: RecordKind::BadTime,
        });
    }

    // Interleave all hosts in arrival order.
    records.sort_by(|a, b| a.time.total_cmp(&b.time));
    let documents = records.iter().map(Record::to_document).collect();

    SynthCorpus {
        documents,
        schema_config: schema_config(),
        truth: GroundTruth {
            roles: hosts
                .iter()
                .cloned()
                .zip(roles.iter().map(|r| r.to_string()))
                .collect(),
            attacks,
        },
    }
}
