//! Seeded synthetic data for tests, examples and demos.
//!
//! [`planted_partition`] builds a noisy block-structured touch matrix.
//! [`synthetic_project`] writes a small fake project to disk: git-log
//! exports, mbox archives, an alias override file and a run config. The
//! archives exercise the awkward parts of the input formats (quoted replies,
//! signatures, `>From ` escapes, HTML parts, a message without a date,
//! out-of-range dates and author aliases).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use chrono::{DateTime, TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cluster::TouchMatrix;
use crate::traits::Lexicon;

/// Committers `c00..`, files `f00..` in contiguous groups; each bit of the
/// block pattern is flipped with probability `flip`. Rows never come out
/// empty. Returns the matrix and the planted label of each row.
pub fn planted_partition(
    committers: usize,
    files: usize,
    groups: usize,
    flip: f64,
    seed: u64,
) -> (TouchMatrix, Vec<usize>) {
    assert!(groups >= 1 && committers >= groups && files >= groups);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let row_group: Vec<usize> = (0..committers).map(|i| i * groups / committers).collect();
    let col_group: Vec<usize> = (0..files).map(|j| j * groups / files).collect();
    let mut entries = Vec::new();
    for (i, &g) in row_group.iter().enumerate() {
        let before = entries.len();
        for (j, &h) in col_group.iter().enumerate() {
            let planted = g == h;
            if planted != rng.gen_bool(flip) {
                entries.push((i, j));
            }
        }
        if entries.len() == before {
            let own: Vec<usize> = (0..files).filter(|&j| col_group[j] == g).collect();
            entries.push((i, *own.choose(&mut rng).expect("group has files")));
        }
    }
    let rows = (0..committers).map(|i| format!("c{i:02}")).collect();
    let cols = (0..files).map(|j| format!("f{j:02}")).collect();
    let m = TouchMatrix::from_triplets(rows, cols, entries).expect("rows are non-empty");
    (m, row_group)
}

/// Components of the synthetic project; each is both a repository and a
/// mailing list. The first five anchor the technical groups.
pub const SYNTHETIC_COMPONENTS: [&str; 6] = ["platform", "text", "ui", "releng", "resources", "swt"];

pub const SYNTHETIC_COMMITTERS: usize = 30;

/// Ground truth for one generated committer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntheticCommitter {
    pub name: String,
    /// Primary address; the canonical one after identity resolution.
    pub email: String,
    pub technical_group: usize,
    pub personality_group: usize,
    /// Writes enough list text to pass the default word gate.
    pub eligible: bool,
}

#[derive(Debug, Clone)]
pub struct SyntheticProject {
    pub root: PathBuf,
    pub config: PathBuf,
    pub committers: Vec<SyntheticCommitter>,
}

const FIRST: [&str; 30] = [
    "Alice", "Bruno", "Carla", "Dmitri", "Elena", "Farid", "Greta", "Hiro", "Ines", "Jonas", "Kofi", "Lena",
    "Marco", "Nadia", "Oskar", "Priya", "Quentin", "Rosa", "Stefan", "Tamara", "Umar", "Vera", "Walter", "Xenia",
    "Yusuf", "Zoe", "Anton", "Beatriz", "Cyril", "Dalia",
];
const LAST: [&str; 30] = [
    "Meyer", "Santos", "Novak", "Ivanov", "Rossi", "Haddad", "Lind", "Tanaka", "Garcia", "Berg", "Mensah", "Weber",
    "Conti", "Karimi", "Nilsen", "Sharma", "Dubois", "Marin", "Kraus", "Petrova", "Malik", "Costa", "Brandt",
    "Orlova", "Demir", "Laurent", "Fischer", "Alves", "Moreau", "Haddad-Ali",
];

/// Trait-bearing words per personality group: sociable, orderly, anxious.
const VOCAB: [&[&str]; 3] = [
    &[
        "everyone", "excited", "meet", "social", "talk", "community", "gathering", "party", "awesome", "fun", "glad",
        "great", "happy", "trust", "believe",
    ],
    &[
        "cleanup", "order", "organize", "tidy", "must", "policy", "rules", "should", "complete", "deadline", "finish",
        "careful", "verify", "safe", "responsibility",
    ],
    &[
        "afraid", "nervous", "stress", "upset", "worried", "anxious", "concern", "fear", "angry", "annoying",
        "broken", "panic", "overwhelmed", "ridiculous", "hate",
    ],
];

const FILLER: [&str; 72] = [
    "the", "patch", "build", "file", "method", "class", "commit", "branch", "test", "null", "pointer", "line",
    "code", "update", "plugin", "editor", "view", "workspace", "change", "version", "release", "bug", "fix",
    "review", "a", "an", "in", "on", "for", "with", "to", "of", "is", "was", "it", "this", "that", "we", "i",
    "builder", "compile", "compiler", "java", "source", "bundle", "manifest", "job", "thread", "jar", "handler",
    "widget", "shell", "dialog", "preference", "marker", "resource", "project", "delta", "listener", "event",
    "label", "command", "menu", "toolbar", "bugzilla", "nightly", "milestone", "stack", "trace", "log", "and",
    "then",
];

const BASE: &str = "example.org";

fn committer_email(first: &str, last: &str) -> String {
    format!("{}.{}@{BASE}", first.to_lowercase(), last.to_lowercase().replace('-', ""))
}

fn committers() -> Vec<SyntheticCommitter> {
    (0..SYNTHETIC_COMMITTERS)
        .map(|i| SyntheticCommitter {
            name: format!("{} {}", FIRST[i], LAST[i]),
            email: committer_email(FIRST[i], LAST[i]),
            technical_group: i / 6,
            personality_group: i % 3,
            eligible: i % 6 != 5,
        })
        .collect()
}

fn random_time(rng: &mut ChaCha8Rng) -> DateTime<Utc> {
    let start = Utc.with_ymd_and_hms(2005, 1, 1, 0, 0, 0).unwrap().timestamp();
    let end = Utc.with_ymd_and_hms(2014, 6, 30, 0, 0, 0).unwrap().timestamp();
    Utc.timestamp_opt(rng.gen_range(start..end), 0).unwrap()
}

fn repo_file(component: &str, j: usize) -> String {
    format!("org.eclipse.{component}/src/org/eclipse/{component}/Part{j:02}.java")
}

struct Commit {
    id: String,
    name: String,
    email: String,
    at: DateTime<Utc>,
    files: Vec<String>,
}

fn write_git_logs(dir: &Path, people: &[SyntheticCommitter], rng: &mut ChaCha8Rng) -> io::Result<()> {
    let mut per_repo: Vec<Vec<Commit>> = (0..SYNTHETIC_COMPONENTS.len()).map(|_| Vec::new()).collect();
    let mut serial = 0u32;
    let mut next_id = |rng: &mut ChaCha8Rng| {
        serial += 1;
        format!("{:08x}{:032x}", serial, rng.gen::<u128>())
    };
    for (i, p) in people.iter().enumerate() {
        let own = p.technical_group;
        for n in 0..rng.gen_range(14..=18) {
            let repo = if rng.gen_bool(0.08) { rng.gen_range(0..SYNTHETIC_COMPONENTS.len()) } else { own };
            let comp = SYNTHETIC_COMPONENTS[repo];
            let mut files: Vec<String> = (0..rng.gen_range(2..=4)).map(|_| repo_file(comp, rng.gen_range(0..12))).collect();
            if own == 0 && rng.gen_bool(0.3) {
                files.push(repo_file("swt", rng.gen_range(0..12)));
            }
            // the first committer also commits under an old address
            let email = if i == 0 && n % 4 == 0 { "alice@oldmail.example.net".to_string() } else { p.email.clone() };
            per_repo[repo].push(Commit { id: next_id(rng), name: p.name.clone(), email, at: random_time(rng), files });
        }
    }
    // outside the default window on both sides
    for (year, who) in [(2002, 3), (2016, 3), (2017, 8)] {
        let p = &people[who];
        per_repo[p.technical_group].push(Commit {
            id: next_id(rng),
            name: p.name.clone(),
            email: p.email.clone(),
            at: Utc.with_ymd_and_hms(year, 6, 1, 12, 0, 0).unwrap(),
            files: vec![repo_file(SYNTHETIC_COMPONENTS[p.technical_group], 0)],
        });
    }
    fs::create_dir_all(dir)?;
    for (repo, mut commits) in per_repo.into_iter().enumerate() {
        commits.sort_by(|a, b| (a.at, &a.id).cmp(&(b.at, &b.id)));
        let mut text = String::new();
        for c in commits {
            writeln!(text, "commit {}\nauthor {} <{}>\ndate {}\n", c.id, c.name, c.email, c.at.to_rfc3339()).unwrap();
            for f in &c.files {
                writeln!(text, "{f}").unwrap();
            }
            text.push_str("---\n");
        }
        fs::write(dir.join(format!("{}.log", SYNTHETIC_COMPONENTS[repo])), text)?;
    }
    Ok(())
}

struct Mail {
    list: usize,
    from_name: String,
    from_email: String,
    at: Option<DateTime<Utc>>,
    subject: String,
    body: String,
    html: bool,
}

fn paragraph(rng: &mut ChaCha8Rng, filler: &[&str], vocab: Option<&[&str]>, words: usize, rate: f64) -> String {
    let mut out = String::new();
    for w in 0..words {
        let word = match vocab {
            Some(v) if rng.gen_bool(rate) => v.choose(rng).unwrap(),
            _ => filler.choose(rng).unwrap(),
        };
        out.push_str(word);
        out.push(if w % 12 == 11 { '\n' } else { ' ' });
    }
    out.trim_end().to_string() + "\n"
}

fn write_mboxes(dir: &Path, people: &[SyntheticCommitter], rng: &mut ChaCha8Rng) -> io::Result<()> {
    let lexicon = Lexicon::bundled();
    let filler: Vec<&str> = FILLER
        .iter()
        .copied()
        .filter(|w| lexicon.raw_scores(w).iter().all(|&s| s == 0.0))
        .collect();
    let lists = SYNTHETIC_COMPONENTS.len();
    let mut mails = Vec::new();
    for (i, p) in people.iter().enumerate() {
        let count = if p.eligible { 26 } else { 10 };
        let vocab = VOCAB[p.personality_group];
        let rate = rng.gen_range(0.045..0.065);
        // the second committer posts from home under a nickname
        let (from_name, from_email) = if i == 1 {
            ("Bru".to_string(), "bru@home.example.net".to_string())
        } else {
            (p.name.clone(), p.email.clone())
        };
        for n in 0..count {
            let list = if rng.gen_bool(0.8) { p.technical_group } else { rng.gen_range(0..lists) };
            let mut body = String::new();
            if n % 3 == 1 {
                writeln!(body, "On Tue, Mar 4, 2008 at 10:12 AM, Someone Else <someone@{BASE}> wrote:").unwrap();
                body.push_str("> quoted happy crowd party text from the previous mail\n> more quoted text\n\n");
            }
            let words = rng.gen_range(150..=170);
            body.push_str(&paragraph(rng, &filler, Some(vocab), words, rate));
            if n % 4 == 2 {
                write!(body, "\n-- \n{}\nEclipse committer, happy to help\n", p.name).unwrap();
            }
            mails.push(Mail {
                list,
                from_name: from_name.clone(),
                from_email: from_email.clone(),
                at: Some(random_time(rng)),
                subject: format!("[{}] question {n}", SYNTHETIC_COMPONENTS[list]),
                body,
                html: false,
            });
        }
    }
    // list users who never commit; one shares a committer's name
    let users = [
        ("Pat Jordan", "pat.jordan@users.example.net"),
        ("Sam Lee", "sam@users.example.net"),
        ("Kim Park", "kim.park@users.example.net"),
        ("Carla Novak", "carla.n@users.example.net"),
    ];
    for (u, (name, email)) in users.iter().enumerate() {
        for n in 0..6 {
            mails.push(Mail {
                list: (u + n) % lists,
                from_name: name.to_string(),
                from_email: email.to_string(),
                at: Some(random_time(rng)),
                subject: format!("newbie question {n}"),
                body: paragraph(rng, &filler, None, 60, 0.0),
                html: false,
            });
        }
    }
    // format corner cases
    let p = &people[0];
    mails.push(Mail {
        list: 0,
        from_name: p.name.clone(),
        from_email: p.email.clone(),
        at: Some(random_time(rng)),
        subject: "build log".into(),
        body: "From the build log we see the compiler fails\nthen the job stops\n".into(),
        html: false,
    });
    mails.push(Mail {
        list: 1,
        from_name: p.name.clone(),
        from_email: p.email.clone(),
        at: Some(random_time(rng)),
        subject: "formatted".into(),
        body: "the plain part of the mail\n".into(),
        html: true,
    });
    mails.push(Mail {
        list: 2,
        from_name: p.name.clone(),
        from_email: p.email.clone(),
        at: None,
        subject: "no date".into(),
        body: "this mail has no date header\n".into(),
        html: false,
    });
    for year in [2001, 2015, 2019] {
        mails.push(Mail {
            list: 3,
            from_name: people[4].name.clone(),
            from_email: people[4].email.clone(),
            at: Some(Utc.with_ymd_and_hms(year, 2, 2, 9, 0, 0).unwrap()),
            subject: "out of window".into(),
            body: "happy party crowd everyone\n".into(),
            html: false,
        });
    }

    fs::create_dir_all(dir)?;
    let fallback = Utc.with_ymd_and_hms(2010, 1, 1, 0, 0, 0).unwrap();
    for (list, comp) in SYNTHETIC_COMPONENTS.iter().enumerate() {
        let mut these: Vec<(usize, &Mail)> = mails.iter().enumerate().filter(|(_, m)| m.list == list).collect();
        these.sort_by_key(|(n, m)| (m.at.unwrap_or(fallback), *n));
        let mut text = String::new();
        for (n, m) in these {
            let at = m.at.unwrap_or(fallback);
            writeln!(text, "From {} {}", m.from_email, at.format("%a %b %e %H:%M:%S %Y")).unwrap();
            writeln!(text, "From: {} <{}>", m.from_name, m.from_email).unwrap();
            writeln!(text, "To: {comp}-dev@lists.{BASE}").unwrap();
            writeln!(text, "Subject: {}", m.subject).unwrap();
            if let Some(at) = m.at {
                writeln!(text, "Date: {}", at.to_rfc2822()).unwrap();
            }
            writeln!(text, "Message-ID: <m{n:05}.{comp}@lists.{BASE}>").unwrap();
            if m.html {
                text.push_str("MIME-Version: 1.0\nContent-Type: multipart/alternative; boundary=\"b1\"\n\n");
                text.push_str("--b1\nContent-Type: text/plain; charset=utf-8\n\n");
                text.push_str(&m.body);
                text.push_str("\n--b1\nContent-Type: text/html; charset=utf-8\n\n<p>the <b>html</b> part</p>\n--b1--\n");
            } else {
                text.push('\n');
                for line in m.body.lines() {
                    // mboxrd escaping
                    if line.trim_start_matches('>').starts_with("From ") {
                        text.push('>');
                    }
                    text.push_str(line);
                    text.push('\n');
                }
            }
            text.push('\n');
        }
        fs::write(dir.join(format!("{comp}.mbox")), text)?;
    }
    Ok(())
}

/// Writes the synthetic project under `root` and returns its layout and
/// ground truth. The same seed always yields the same bytes.
pub fn synthetic_project(root: &Path, seed: u64) -> io::Result<SyntheticProject> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let people = committers();
    write_git_logs(&root.join("raw/git"), &people, &mut rng)?;
    write_mboxes(&root.join("raw/mbox"), &people, &mut rng)?;

    let overrides = serde_json::json!({
        "merge": [[people[1].email, "bru@home.example.net"]],
        "never_merge": [[people[2].email, "carla.n@users.example.net"]],
    });
    fs::write(root.join("overrides.json"), serde_json::to_string_pretty(&overrides)? + "\n")?;

    let prefixes: Vec<(String, &str)> = SYNTHETIC_COMPONENTS
        .iter()
        .map(|c| (format!("org.eclipse.{c}/"), *c))
        .collect();
    let config = serde_json::json!({
        "workspace": "workspace",
        "inputs": {
            "git_logs": "raw/git",
            "mbox_dir": "raw/mbox",
            "overrides": "overrides.json",
        },
        "seed": seed,
        "component_map": { "prefixes": prefixes },
        "sweep": { "technical": "2..8", "personality": "2..6" },
    });
    let config_path = root.join("config.json");
    fs::write(&config_path, serde_json::to_string_pretty(&config)? + "\n")?;
    Ok(SyntheticProject { root: root.to_path_buf(), config: config_path, committers: people })
}
