//! Average representations: the centroid of a group of logs, how far each
//! member sits from it, and the group variance.
//!
//! The group is a batch of "new Windows Explorer process" logs; most are
//! launched by the usual parents, one was spawned by a random temp file.
//! Distance to the centroid ranks that one as the most unusual.
//!
//! ```bash
//! cargo run --release --example centroid_summary
//! ```

use logmetric::aggregate::{centroid, d_to_centroid, variance_entries};
use logmetric::entry::{AttributeValue, LogEntry};
use logmetric::schema::SchemaBuilder;

fn main() {
    let schema = SchemaBuilder::new("t")
        .categorical("CreatorProc", ["USERINIT", "EXPLORER", "4328"])
        .numerical("TokenElevation", 1.0, 3.0)
        .string("CmdLine")
        .build()
        .expect("valid schema");

    let launch = |creator_slot: usize, cmd: &str| LogEntry {
        time: 0.0,
        values: vec![
            AttributeValue::one_hot(creator_slot, 4),
            AttributeValue::Numerical(3.0),
            AttributeValue::Str(cmd.into()),
        ],
    };

    let labels = [
        "userinit", "userinit", "explorer", "explorer", "userinit", "4328.tmp",
    ];
    let group = vec![
        launch(1, r"C:\Windows\explorer.exe"),
        launch(1, r"C:\Windows\explorer.exe"),
        launch(2, r"C:\Windows\Explorer.exe"),
        launch(2, r"C:\Windows\explorer.exe"),
        launch(1, r"C:\Windows\explorer.exe"),
        // The odd one out: spawned by a dropped temp file, no command line.
        launch(3, ""),
    ];

    let c = centroid(&group, &schema).unwrap();
    println!("creator-process mix of the group:");
    for (name, fraction) in c.category_fractions(&schema, 0) {
        println!("  {name:<10} {fraction:.3}");
    }

    println!("\ndistance of each member to the centroid:");
    let mut ranked: Vec<(f64, &str)> = group
        .iter()
        .zip(labels)
        .map(|(e, label)| (d_to_centroid(e, &c, &schema).unwrap(), label))
        .collect();
    ranked.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (d, label) in &ranked {
        println!("  {d:.3}  launched by {label}");
    }
    println!(
        "\nmost unusual member: launched by {} (group variance {:.4})",
        ranked.last().unwrap().1,
        variance_entries(&group, &schema).unwrap()
    );
}
