//! Minimal document model rendered to Markdown or self-contained HTML.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::svg::escape;

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Heading { level: usize, text: String },
    Paragraph(String),
    /// Paragraph rendered in italics.
    Note(String),
    Bullets(Vec<String>),
    Table { header: Vec<String>, rows: Vec<Vec<String>> },
    /// Image referenced by its path relative to the report.
    Image { alt: String, path: String },
}

fn md_cell(s: &str) -> String {
    s.replace('|', "\\|").replace('\n', " ")
}

pub fn to_markdown(blocks: &[Block]) -> String {
    let mut out = String::new();
    for block in blocks {
        match block {
            Block::Heading { level, text } => {
                let _ = writeln!(out, "{} {text}\n", "#".repeat(*level));
            }
            Block::Paragraph(text) => {
                let _ = writeln!(out, "{text}\n");
            }
            Block::Note(text) => {
                let _ = writeln!(out, "*{text}*\n");
            }
            Block::Bullets(items) => {
                for item in items {
                    let _ = writeln!(out, "- {item}");
                }
                out.push('\n');
            }
            Block::Table { header, rows } => {
                let head: Vec<String> = header.iter().map(|h| md_cell(h)).collect();
                let _ = writeln!(out, "| {} |", head.join(" | "));
                let _ = writeln!(out, "|{}", "---|".repeat(header.len()));
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|c| md_cell(c)).collect();
                    let _ = writeln!(out, "| {} |", cells.join(" | "));
                }
                out.push('\n');
            }
            Block::Image { alt, path } => {
                let _ = writeln!(out, "![{}]({path})\n", alt.replace(['[', ']'], ""));
            }
        }
    }
    out
}

const STYLE: &str = "body{font-family:sans-serif;max-width:60em;margin:2em auto;padding:0 1em;line-height:1.45}\
table{border-collapse:collapse;margin:0.5em 0}td,th{border:1px solid #ccc;padding:2px 8px;text-align:left}\
figure{margin:1em 0}svg{max-width:100%;height:auto}@media print{figure{page-break-inside:avoid}}";

/// Renders HTML with every image inlined from `images` (keyed by path).
pub fn to_html(title: &str, blocks: &[Block], images: &BTreeMap<String, String>) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n<title>{}</title>\n<style>{STYLE}</style>\n</head>\n<body>",
        escape(title)
    );
    for block in blocks {
        match block {
            Block::Heading { level, text } => {
                let _ = writeln!(out, "<h{level}>{}</h{level}>", escape(text));
            }
            Block::Paragraph(text) => {
                let _ = writeln!(out, "<p>{}</p>", escape(text));
            }
            Block::Note(text) => {
                let _ = writeln!(out, "<p><em>{}</em></p>", escape(text));
            }
            Block::Bullets(items) => {
                out.push_str("<ul>\n");
                for item in items {
                    let _ = writeln!(out, "<li>{}</li>", escape(item));
                }
                out.push_str("</ul>\n");
            }
            Block::Table { header, rows } => {
                out.push_str("<table>\n<tr>");
                for h in header {
                    let _ = write!(out, "<th>{}</th>", escape(h));
                }
                out.push_str("</tr>\n");
                for row in rows {
                    out.push_str("<tr>");
                    for c in row {
                        let _ = write!(out, "<td>{}</td>", escape(c));
                    }
                    out.push_str("</tr>\n");
                }
                out.push_str("</table>\n");
            }
            Block::Image { alt, path } => {
                out.push_str("<figure>\n");
                match images.get(path) {
                    Some(svg) => out.push_str(svg),
                    None => {
                        let _ = writeln!(out, "<img src=\"{}\" alt=\"{}\">", escape(path), escape(alt));
                    }
                }
                let _ = writeln!(out, "<figcaption>{}</figcaption>\n</figure>", escape(alt));
            }
        }
    }
    out.push_str("</body>\n</html>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Vec<Block> {
        vec![
            Block::Heading { level: 1, text: "Report".into() },
            Block::Paragraph("a < b".into()),
            Block::Table {
                header: vec!["k".into(), "v".into()],
                rows: vec![vec!["x|y".into(), "1".into()]],
            },
            Block::Image { alt: "plot".into(), path: "p.svg".into() },
        ]
    }

    #[test]
    fn markdown_rendering() {
        let md = to_markdown(&sample());
        assert!(md.starts_with("# Report\n"));
        assert!(md.contains("| x\\|y | 1 |"));
        assert!(md.contains("![plot](p.svg)"));
    }

    #[test]
    fn html_inlines_images() {
        let mut images = BTreeMap::new();
        images.insert("p.svg".to_string(), "<svg id=\"inline\"></svg>".to_string());
        let html = to_html("Report", &sample(), &images);
        assert!(html.contains("<svg id=\"inline\"></svg>"));
        assert!(html.contains("<p>a &lt; b</p>"));
        assert!(!html.contains("<img"));
    }
}
