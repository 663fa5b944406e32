//! The whole pipeline from a config file, run twice: the second run finds
//! every input unchanged and skips all stages.
//!
//! ```text
//! cargo run --release --example full_pipeline [out-dir]
//! ```

use std::path::PathBuf;

use pscore_skill::eval::{generate_synthetic, write_latent, SyntheticConfig};
use pscore_skill::ingest::write_games;
use pscore_skill::pipeline::{run_pipeline, PipelineConfig};

fn main() {
    let root = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("pskill-example"));
    std::fs::create_dir_all(&root).unwrap();

    let syn = SyntheticConfig {
        n_players: 100,
        n_contexts: 2,
        context_offsets: vec![1.0, -1.0],
        inter_context_rate: 0.05,
        games_per_step: 4,
        steps: 450,
        seed: 2,
        ..Default::default()
    };
    let corpus = generate_synthetic(&syn).unwrap();
    write_games(std::fs::File::create(root.join("games.jsonl")).unwrap(), &corpus.games).unwrap();
    write_latent(std::fs::File::create(root.join("latent.tsv")).unwrap(), &corpus.players).unwrap();

    let toml = format!(
        r#"seed = 1

[input]
games = "{0}/games.jsonl"
latent = "{0}/latent.tsv"
out_dir = "{0}/out"

[rating]
mode = "ffa"
variant = "meta"

[eval]
train_days = 365
test_days = 30
"#,
        root.display()
    );
    std::fs::write(root.join("pskill.toml"), &toml).unwrap();
    let cfg = PipelineConfig::load(&root.join("pskill.toml")).unwrap();

    for attempt in 1..=2 {
        let report = run_pipeline(&cfg, false);
        if let Some(e) = &report.error {
            eprintln!("failed: {e}");
            std::process::exit(e.exit_code());
        }
        println!("run {attempt}: ran {:?}, skipped {:?}", report.ran, report.skipped);
    }

    let manifest = pscore_skill::pipeline::Manifest::load(&cfg.input.out_dir).unwrap();
    for stage in &manifest.stages {
        for o in &stage.outputs {
            println!("  {:<8} {:<28} {:>9} B  {}", stage.name, o.path, o.bytes, &o.sha256[..12]);
        }
    }
    println!("\n{}", std::fs::read_to_string(cfg.input.out_dir.join("eval/summary.txt")).unwrap());
}
