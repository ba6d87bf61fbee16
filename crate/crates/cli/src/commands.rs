use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;
use xlex::engine::{Classifier, LexiconSelector, ModelConfig};
use xlex::evaluation::{
    benchmark, evaluate, grid_search, lm_constrained_subset, read_labeled, read_labeled_path, GridSource, GridSpec,
};
use xlex::lexicon::{build_xlex, Lexicon};
use xlex::merge::{combine, normalize, prepare_lm, read_meta, read_word_list, CombinedLexicon};
use xlex::textprep::LanguageResources;
use xlex::attribution::read_attribution_path;
use xlex::LEXICON_FORMAT_VERSION;

use crate::args::{BenchArgs, BuildArgs, ClassifyArgs, EvaluateArgs, GridArgs, MergeArgs};
use crate::config::{normalized_path, resolve_features, resolve_model, FileConfig};
use crate::failure::{in_file, Failure};
use crate::manifest::RunManifest;

pub struct Context<'a> {
    pub res: &'a LanguageResources,
    pub file: &'a FileConfig,
    pub manifest: &'a mut RunManifest,
}

pub fn build(args: &BuildArgs, cx: &mut Context) -> Result<(), Failure> {
    let mut records = Vec::new();
    for path in &args.inputs {
        let batch = read_attribution_path(path).map_err(in_file(path))?;
        if batch.is_empty() {
            eprintln!("warning: {}: no attribution records", path.display());
        }
        cx.manifest.input(path);
        records.extend(batch);
    }
    let lexicon = build_xlex(&records, cx.res)?;
    if lexicon.is_empty() {
        eprintln!("warning: the lexicon is empty");
    }
    lexicon.write_path(&args.out)?;
    cx.manifest.output(&args.out);
    cx.manifest.settings(json!({ "records": records.len() }));

    let (pos, neg) = lexicon.category_counts();
    println!("positive {pos:>8}");
    println!("negative {neg:>8}");
    println!("total    {:>8}", pos + neg);
    Ok(())
}

pub fn merge_lm(args: &MergeArgs, cx: &mut Context) -> Result<(), Failure> {
    let xlex = Lexicon::read_path(&args.xlex).map_err(in_file(&args.xlex))?;
    let lm = prepare_lm(read_word_list(&args.lm_pos)?, read_word_list(&args.lm_neg)?, cx.res)?;
    for p in [&args.xlex, &args.lm_pos, &args.lm_neg] {
        cx.manifest.input(p);
    }
    let source = match &args.source {
        Some(s) => s.clone(),
        None => args
            .out_prefix
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .ok_or_else(|| Failure::usage("--out-prefix has no file name"))?,
    };
    let combined = combine(&xlex, &lm);
    let norm = normalize(&combined)?;
    let prefix = args.out_prefix.to_string_lossy();
    let std_path = PathBuf::from(format!("{prefix}.csv"));
    let norm_path = PathBuf::from(format!("{prefix}.norm.csv"));
    for (lexicon, path) in [(&combined, &std_path), (&norm, &norm_path)] {
        lexicon.write_path(path, &source)?;
        cx.manifest.output(path);
        cx.manifest.output(&xlex::merge::meta_path(path));
    }
    cx.manifest.settings(json!({ "source": source }));

    let both = combined.iter().filter(|e| e.xlex.category.is_some() && e.lm.category.is_some()).count();
    println!("xlex     {:>8}", xlex.len());
    println!("lm       {:>8}", lm.len());
    println!("overlap  {both:>8}");
    println!("combined {:>8}", combined.len());
    Ok(())
}

pub fn classify(args: &ClassifyArgs, cx: &mut Context) -> Result<(), Failure> {
    let model = resolve_model(&args.model, cx.file)?;
    let sentences = read_sentences(&args.input)?;
    let lexicon = CombinedLexicon::read_path(&model.lexicon).map_err(in_file(&model.lexicon))?;
    cx.manifest.input(&args.input);
    cx.manifest.input(&model.lexicon);
    cx.manifest.settings(model_snapshot(&model.config, &model.lexicon));

    let verdicts = Classifier::new(&lexicon, model.config, cx.res).classify_batch(&sentences);
    write_output(args.out.as_deref(), cx.manifest, |w| {
        writeln!(w, "sentence_index,value,polarity,matched_words")?;
        for (i, v) in verdicts.iter().enumerate() {
            writeln!(w, "{i},{},{},{}", v.value, v.polarity, v.matched_words)?;
        }
        Ok(())
    })
}

pub fn evaluate_cmd(args: &EvaluateArgs, cx: &mut Context) -> Result<(), Failure> {
    let model = resolve_model(&args.model, cx.file)?;
    let data = read_labeled_path(&args.data).map_err(in_file(&args.data))?;
    let lexicon = CombinedLexicon::read_path(&model.lexicon).map_err(in_file(&model.lexicon))?;
    cx.manifest.input(&args.data);
    cx.manifest.input(&model.lexicon);
    let mut snapshot = model_snapshot(&model.config, &model.lexicon);
    snapshot["lm_constrained"] = json!(args.lm_constrained);
    cx.manifest.settings(snapshot);

    let data = if args.lm_constrained {
        let lm_only = ModelConfig { selector: LexiconSelector::LM, ..model.config };
        let subset = lm_constrained_subset(&data, &lm_only, &lexicon, cx.res)?;
        println!("LM-constrained subset: {} of {} sentences\n", subset.len(), data.len());
        subset
    } else {
        data
    };
    let report = evaluate(&data, &lexicon, &model.config, cx.res)?;
    print!("{}", report.classification_report());
    if let Some(path) = &args.json {
        write_json(path, &report)?;
        cx.manifest.output(path);
    }
    Ok(())
}

pub fn grid(args: &GridArgs, cx: &mut Context) -> Result<(), Failure> {
    let mut paths = args.lexicons.clone();
    if paths.is_empty() {
        paths.extend(cx.file.lexicon.clone());
    }
    if paths.is_empty() {
        return Err(Failure::usage("no lexicon given; pass --lexicon or set `lexicon` in the config file"));
    }
    if args.normalized || cx.file.normalized == Some(true) {
        paths = paths.iter().map(|p| normalized_path(p)).collect();
    }

    let mut groups: BTreeMap<String, Vec<CombinedLexicon>> = BTreeMap::new();
    for path in &paths {
        let lexicon = CombinedLexicon::read_path(path).map_err(in_file(path))?;
        groups.entry(source_name(path)?).or_default().push(lexicon);
        cx.manifest.input(path);
    }
    let sources: Vec<GridSource> = groups.into_iter().map(|(name, lexicons)| GridSource { name, lexicons }).collect();
    let mut datasets = Vec::with_capacity(args.data.len());
    for path in &args.data {
        datasets.push(read_labeled_path(path).map_err(in_file(path))?);
        cx.manifest.input(path);
    }

    let spec = GridSpec {
        values: args.values.clone(),
        lmo: args.lmo,
        features: resolve_features(args.features, cx.file)?,
        selectors: args.selectors.clone(),
    };
    cx.manifest.settings(json!({
        "values": spec.values,
        "lmo": spec.lmo,
        "features": spec.features.to_string(),
        "selectors": spec.selectors.iter().map(|s| s.as_str()).collect::<Vec<_>>(),
        "sources": sources.iter().map(|s| &s.name).collect::<Vec<_>>(),
    }));

    let result = grid_search(&sources, &datasets, &spec, cx.res)?;
    write_output(args.out.as_deref(), cx.manifest, |w| result.write_csv(w).map_err(to_io))?;

    let b = result.best.as_array();
    let summary = format!(
        "best c_xlp={} c_xlo={} c_lmp={} c_lmo={} aggregated_average={:.6} ({} rows)",
        b[0],
        b[1],
        b[2],
        b[3],
        result.aggregated_average,
        result.rows.len()
    );
    if args.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

pub fn bench(args: &BenchArgs, cx: &mut Context) -> Result<(), Failure> {
    let model = resolve_model(&args.model, cx.file)?;
    let reps = args.reps.or(cx.file.reps).unwrap_or(10);
    let sentences = read_sentences(&args.input)?;
    cx.manifest.input(&args.input);
    cx.manifest.input(&model.lexicon);
    let mut snapshot = model_snapshot(&model.config, &model.lexicon);
    snapshot["reps"] = json!(reps);
    cx.manifest.settings(snapshot);

    let report = benchmark(&sentences, &model.lexicon, &model.config, reps, cx.res).map_err(|e| match e {
        xlex::Error::InvalidConfig(_) => Failure::from(e),
        e => in_file(&model.lexicon)(e),
    })?;
    println!("{report}");
    if let Some(path) = &args.json {
        write_json(path, &report)?;
        cx.manifest.output(path);
    }
    Ok(())
}

/// One sentence per non-blank line, or the `sentence` column of a labeled CSV.
fn read_sentences(path: &Path) -> Result<Vec<String>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let body = text.strip_prefix('\u{feff}').unwrap_or(&text);
    if body.lines().next().map(str::trim_end) == Some("sentence,label") {
        let rows = read_labeled(body.as_bytes()).map_err(in_file(path))?;
        return Ok(rows.into_iter().map(|s| s.sentence).collect());
    }
    Ok(body.lines().filter(|l| !l.trim().is_empty()).map(str::to_owned).collect())
}

/// Sidecar source name, else the file name without `.norm.csv` or `.csv`.
fn source_name(path: &Path) -> Result<String, Failure> {
    if let Some(meta) = read_meta(path).map_err(in_file(path))? {
        return Ok(meta.source);
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name.strip_suffix(".norm.csv").or_else(|| name.strip_suffix(".csv")).unwrap_or(&name);
    Ok(stem.to_owned())
}

fn model_snapshot(config: &ModelConfig, lexicon: &Path) -> serde_json::Value {
    json!({
        "lexicon": lexicon,
        "selector": config.selector.as_str(),
        "features": config.features.to_string(),
        "coeffs": config.coefficients.as_array(),
        "lexicon_format_version": LEXICON_FORMAT_VERSION,
    })
}

fn write_output<F>(path: Option<&Path>, manifest: &mut RunManifest, body: F) -> Result<(), Failure>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) => {
            let file = File::create(p).map_err(|e| Failure::io(p, e))?;
            let mut w = BufWriter::new(file);
            body(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::io(p, e))?;
            manifest.output(p);
        }
        None => {
            let mut w = io::stdout().lock();
            body(&mut w).and_then(|_| w.flush()).map_err(|e| Failure::io(Path::new("<stdout>"), e))?;
        }
    }
    Ok(())
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    let json = serde_json::to_string_pretty(value).map_err(|e| Failure::data(e.to_string()))?;
    fs::write(path, json + "\n").map_err(|e| Failure::io(path, e))
}

fn to_io(e: xlex::Error) -> io::Error {
    match e {
        xlex::Error::Io { source, .. } => source,
        other => io::Error::other(other.to_string()),
    }
}
