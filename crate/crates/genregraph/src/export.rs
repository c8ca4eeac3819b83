//! Serialize networks, partitions, centralities, enrichment and PCA outputs
//! to Gephi-compatible GEXF 1.2 and CSV reports.
//!
//! Everything is emitted in deterministic sorted order so repeat runs with
//! the same seed and config produce byte-identical files.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::centrality::{CentralityScores, Measure};
use crate::error::{Error, Result};
use crate::model::{Partition, PcaResult, SimilarityGraph};
use crate::subjects::EnrichmentReport;

/// Floats are written with nine significant digits: enough to round-trip
/// Jaccard weights at 1e-9 without bloating files.
pub(crate) fn fmt_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if (-4..9).contains(&mag) {
        let decimals = (8 - mag).max(0) as usize;
        let s = format!("{x:.decimals$}");
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        }
    } else {
        format!("{x:.8e}")
    }
}

fn xml_escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for ch in text.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            other => out.push(other),
        }
    }
    out
}

/// Write the similarity network as GEXF 1.2: undirected, float edge
/// weights, node attributes for community membership and each supplied
/// centrality. Nodes and edges are emitted in name-sorted order.
pub fn write_gexf<W: Write>(
    sg: &SimilarityGraph,
    p: &Partition,
    scores: &[CentralityScores],
    mut out: W,
) -> Result<()> {
    if p.len() != sg.node_count() {
        return Err(Error::Mismatch(format!(
            "partition covers {} nodes, graph has {}",
            p.len(),
            sg.node_count()
        )));
    }
    for s in scores {
        if s.len() != sg.node_count() {
            return Err(Error::Mismatch(format!(
                "{} scores cover {} nodes, graph has {}",
                s.measure,
                s.len(),
                sg.node_count()
            )));
        }
    }

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#)?;
    writeln!(
        out,
        r#"<gexf xmlns="http://www.gexf.net/1.2draft" version="1.2">"#
    )?;
    writeln!(out, "  <meta>")?;
    writeln!(out, "    <creator>genregraph</creator>")?;
    writeln!(out, "  </meta>")?;
    writeln!(out, r#"  <graph defaultedgetype="undirected">"#)?;
    writeln!(out, r#"    <attributes class="node">"#)?;
    writeln!(
        out,
        r#"      <attribute id="0" title="community" type="integer"/>"#
    )?;
    for (i, s) in scores.iter().enumerate() {
        writeln!(
            out,
            r#"      <attribute id="{}" title="{}" type="float"/>"#,
            i + 1,
            s.measure
        )?;
    }
    writeln!(out, "    </attributes>")?;

    let mut order: Vec<u32> = (0..sg.node_count() as u32).collect();
    order.sort_by_key(|&v| sg.books().name(v));

    writeln!(out, "    <nodes>")?;
    for &v in &order {
        let name = xml_escape(sg.books().name(v));
        writeln!(out, r#"      <node id="{name}" label="{name}">"#)?;
        writeln!(out, "        <attvalues>")?;
        writeln!(
            out,
            r#"          <attvalue for="0" value="{}"/>"#,
            p.community_of(v as usize)
        )?;
        for (i, s) in scores.iter().enumerate() {
            writeln!(
                out,
                r#"          <attvalue for="{}" value="{}"/>"#,
                i + 1,
                fmt_float(s.get(v as usize))
            )?;
        }
        writeln!(out, "        </attvalues>")?;
        writeln!(out, "      </node>")?;
    }
    writeln!(out, "    </nodes>")?;

    let mut edges: Vec<(&str, &str, f64)> = sg
        .edge_list()
        .iter()
        .map(|&(a, b, w)| {
            let (an, bn) = (sg.books().name(a), sg.books().name(b));
            if an <= bn {
                (an, bn, w)
            } else {
                (bn, an, w)
            }
        })
        .collect();
    edges.sort_by(|x, y| (x.0, x.1).cmp(&(y.0, y.1)));

    writeln!(out, "    <edges>")?;
    for (id, (a, b, w)) in edges.iter().enumerate() {
        writeln!(
            out,
            r#"      <edge id="{id}" source="{}" target="{}" weight="{}"/>"#,
            xml_escape(a),
            xml_escape(b),
            fmt_float(*w)
        )?;
    }
    writeln!(out, "    </edges>")?;
    writeln!(out, "  </graph>")?;
    writeln!(out, "</gexf>")?;
    Ok(())
}

/// One row of the per-community representative-book table.
#[derive(Debug, Clone)]
pub struct TopBookRow {
    pub community: u32,
    pub rank: usize,
    pub book: String,
    pub measure: Measure,
    pub score: f64,
}

/// Paths of everything one pipeline run wrote for one network mode.
#[derive(Debug, Clone)]
pub struct ReportBundle {
    pub network: PathBuf,
    pub community_summary: PathBuf,
    pub top_books: PathBuf,
    pub enrichment: PathBuf,
    pub pca_variance: PathBuf,
    pub pca_loadings: PathBuf,
    pub pca_scores: PathBuf,
    pub pca_correlation: PathBuf,
    pub sub_communities: Option<PathBuf>,
    pub sub_community_summary: Option<PathBuf>,
    /// Run manifest with the full config echo and seed; shared across modes.
    pub manifest: PathBuf,
}

pub fn write_community_summary<W: Write>(p: &Partition, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["community", "size", "percent_of_network"])?;
    let total = p.len() as f64;
    for (id, size) in p.sizes().iter().enumerate() {
        w.write_record([
            id.to_string(),
            size.to_string(),
            fmt_float(*size as f64 * 100.0 / total),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_top_books<W: Write>(rows: &[TopBookRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["community", "rank", "book", "measure", "score"])?;
    for row in rows {
        w.write_record([
            row.community.to_string(),
            row.rank.to_string(),
            row.book.clone(),
            row.measure.to_string(),
            fmt_float(row.score),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_enrichment<W: Write>(report: &EnrichmentReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "subject",
        "community",
        "in_community_proportion",
        "global_proportion",
        "lift",
        "g_statistic",
    ])?;
    for row in report.rows() {
        w.write_record([
            row.subject.clone(),
            row.community.to_string(),
            fmt_float(row.in_community_proportion),
            fmt_float(row.global_proportion),
            fmt_float(row.lift),
            fmt_float(row.g_statistic),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Dimensions are reported 1-based in all PCA files.
pub fn write_pca_variance<W: Write>(pca: &PcaResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dimension", "variance_ratio"])?;
    for (d, ratio) in pca.explained_variance_ratio().iter().enumerate() {
        w.write_record([(d + 1).to_string(), fmt_float(*ratio)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_pca_loadings<W: Write>(pca: &PcaResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["dimension", "community", "loading"])?;
    for d in 0..pca.dimensions() {
        for (c, &community) in pca.communities().iter().enumerate() {
            w.write_record([
                (d + 1).to_string(),
                community.to_string(),
                fmt_float(pca.loadings()[(d, c)]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_pca_scores<W: Write>(pca: &PcaResult, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["subject", "dimension", "score"])?;
    for (s, subject) in pca.subjects().iter().enumerate() {
        for d in 0..pca.dimensions() {
            w.write_record([
                subject.clone(),
                (d + 1).to_string(),
                fmt_float(pca.scores()[(s, d)]),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_correlations<W: Write>(rows: &[(u32, u32, f64)], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["community_a", "community_b", "correlation"])?;
    for &(a, b, r) in rows {
        w.write_record([a.to_string(), b.to_string(), fmt_float(r)])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sub_communities<W: Write>(
    subs: &BTreeMap<u32, (SimilarityGraph, Partition)>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["community", "book", "sub_community"])?;
    for (&community, (sub_sg, sub_p)) in subs {
        let mut rows: Vec<(&str, u32)> = sub_sg
            .books()
            .iter()
            .map(|(idx, name)| (name, sub_p.community_of(idx as usize)))
            .collect();
        rows.sort_unstable();
        for (book, sub) in rows {
            w.write_record([
                community.to_string(),
                book.to_string(),
                sub.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_sub_community_summary<W: Write>(
    subs: &BTreeMap<u32, (SimilarityGraph, Partition)>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["community", "sub_community", "size", "percent_of_community"])?;
    for (&community, (_, sub_p)) in subs {
        let total = sub_p.len() as f64;
        for (id, size) in sub_p.sizes().iter().enumerate() {
            w.write_record([
                community.to_string(),
                id.to_string(),
                size.to_string(),
                fmt_float(*size as f64 * 100.0 / total),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Everything needed to serialize one mode's reports.
pub struct ReportInputs<'a> {
    pub sg: &'a SimilarityGraph,
    pub partition: &'a Partition,
    /// Full-network centralities, exported as GEXF node attributes.
    pub centralities: &'a [CentralityScores],
    pub top_books: &'a [TopBookRow],
    pub enrichment: &'a EnrichmentReport,
    pub pca: &'a PcaResult,
    pub correlations: &'a [(u32, u32, f64)],
    pub sub_communities: Option<&'a BTreeMap<u32, (SimilarityGraph, Partition)>>,
}

/// Write the full report bundle into `dir` (created if missing).
pub fn write_reports(
    dir: &Path,
    inputs: &ReportInputs<'_>,
    manifest: &Path,
) -> Result<ReportBundle> {
    if inputs.partition.len() != inputs.sg.node_count() {
        return Err(Error::Mismatch(
            "partition and graph cover different node universes".into(),
        ));
    }
    std::fs::create_dir_all(dir)?;

    let network = dir.join("network.gexf");
    write_gexf(
        inputs.sg,
        inputs.partition,
        inputs.centralities,
        BufWriter::new(File::create(&network)?),
    )?;

    let community_summary = dir.join("community_summary.csv");
    write_community_summary(inputs.partition, csv_sink(&community_summary)?)?;

    let top_books = dir.join("top_books.csv");
    write_top_books(inputs.top_books, csv_sink(&top_books)?)?;

    let enrichment = dir.join("enrichment.csv");
    write_enrichment(inputs.enrichment, csv_sink(&enrichment)?)?;

    let pca_variance = dir.join("pca_variance.csv");
    write_pca_variance(inputs.pca, csv_sink(&pca_variance)?)?;
    let pca_loadings = dir.join("pca_loadings.csv");
    write_pca_loadings(inputs.pca, csv_sink(&pca_loadings)?)?;
    let pca_scores = dir.join("pca_scores.csv");
    write_pca_scores(inputs.pca, csv_sink(&pca_scores)?)?;
    let pca_correlation = dir.join("pca_correlation.csv");
    write_correlations(inputs.correlations, csv_sink(&pca_correlation)?)?;

    let (sub_communities, sub_community_summary) = match inputs.sub_communities {
        Some(subs) => {
            let assignments = dir.join("sub_communities.csv");
            write_sub_communities(subs, csv_sink(&assignments)?)?;
            let summary = dir.join("sub_community_summary.csv");
            write_sub_community_summary(subs, csv_sink(&summary)?)?;
            (Some(assignments), Some(summary))
        }
        None => (None, None),
    };

    Ok(ReportBundle {
        network,
        community_summary,
        top_books,
        enrichment,
        pca_variance,
        pca_loadings,
        pca_scores,
        pca_correlation,
        sub_communities,
        sub_community_summary,
        manifest: manifest.to_path_buf(),
    })
}

fn csv_sink(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}
