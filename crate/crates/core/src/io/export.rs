use std::fmt::Write;

use crate::project::DesignSummary;
use crate::seqgen::Strand;

pub const CSV_HEADER: &str = "strand_id,kind,orientation,length_nt,domains,sequence";

fn row_fields(s: &Strand) -> [String; 6] {
    let domains = s
        .domains
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join(";");
    [
        s.id.clone(),
        s.kind.as_str().to_string(),
        s.orientation.as_str().to_string(),
        s.length_nt().to_string(),
        domains,
        s.sequence.clone(),
    ]
}

/// One row per strand, LF line endings. No field can contain a comma.
pub fn export_csv(strands: &[Strand]) -> Vec<u8> {
    let mut out = String::with_capacity(64 * (strands.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for s in strands {
        out.push_str(&row_fields(s).join(","));
        out.push('\n');
    }
    out.into_bytes()
}

/// Data rows of a CSV export (header dropped).
pub fn parse_csv_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    String::from_utf8_lossy(bytes)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn latex_escape(s: &str) -> String {
    s.replace('_', "\\_")
}

const LATEX_PREAMBLE: &str = "\\documentclass{article}
\\usepackage[landscape,margin=1cm]{geometry}
\\usepackage{longtable}
\\begin{document}
\\scriptsize
\\begin{longtable}{llllp{0.38\\textwidth}p{0.3\\textwidth}}
";

const LATEX_END: &str = "\\end{longtable}
\\end{document}
";

/// A standalone document holding one longtable with the CSV columns.
pub fn export_latex(strands: &[Strand]) -> Vec<u8> {
    let mut out = String::from(LATEX_PREAMBLE);
    let header: Vec<String> = CSV_HEADER.split(',').map(latex_escape).collect();
    out.push_str(&header.join(" & "));
    out.push_str(" \\\\\n\\hline\n\\endhead\n");
    for s in strands {
        let cells: Vec<String> = row_fields(s).iter().map(|c| latex_escape(c)).collect();
        out.push_str(&cells.join(" & "));
        out.push_str(" \\\\\n");
    }
    out.push_str(LATEX_END);
    out.into_bytes()
}

/// Data rows of a LaTeX export, unescaped.
pub fn parse_latex_rows(bytes: &[u8]) -> Vec<Vec<String>> {
    let text = String::from_utf8_lossy(bytes);
    text.lines()
        .skip_while(|l| *l != "\\endhead")
        .skip(1)
        .take_while(|l| !l.starts_with("\\end{longtable}"))
        .map(|l| {
            l.trim_end_matches(" \\\\")
                .split(" & ")
                .map(|c| c.replace("\\_", "_"))
                .collect()
        })
        .collect()
}

/// Plain-text design report with summary and strand table.
pub fn export_report(summary: &DesignSummary, strands: &[Strand]) -> Vec<u8> {
    let mut out = String::new();
    let c = summary.canvas;
    let (x, y, z) = summary.physical_size_nm;
    let _ = writeln!(out, "DNA brick design report");
    let _ = writeln!(
        out,
        "canvas: {}H x {}H x {}B ({:.1} nm x {:.1} nm x {:.1} nm)",
        c.width_helices, c.height_helices, c.depth_bp, x, y, z
    );
    let _ = writeln!(out, "voxels: {}", summary.selected_voxels);
    let _ = writeln!(out, "domains: {}", summary.domains);
    let b = summary.bricks;
    let _ = writeln!(
        out,
        "strands: {} (full {}, half {}, boundary {}, fragment {})",
        summary.strands, b.full, b.half, b.boundary, b.fragment
    );
    let _ = writeln!(out, "nucleotides: {}", summary.total_nt);
    let _ = writeln!(out, "cost: {}", summary.cost);
    let _ = writeln!(out);
    let width = strands.iter().map(|s| s.id.len()).max().unwrap_or(0).max(9);
    let _ = writeln!(
        out,
        "{:<width$}  {:<8}  {:>3}  sequence",
        "strand_id", "kind", "nt"
    );
    for s in strands {
        let _ = writeln!(
            out,
            "{:<width$}  {:<8}  {:>3}  {}",
            s.id,
            s.kind.as_str(),
            s.length_nt(),
            s.sequence
        );
    }
    out.into_bytes()
}
