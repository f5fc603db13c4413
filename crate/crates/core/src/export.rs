//! Graph exports: structured JSON, GraphML, GEXF and node/edge CSV lists.
//!
//! `communities` optionally tags each node id with a community label
//! (for example `"C1"` or `"C1;C2"` for shared nodes).

use crate::network::NarrativeNetwork;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt::Write as _;

pub type NodeTags = BTreeMap<String, String>;

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

fn verb_label(verbs: &[crate::significance::VerbScore]) -> String {
    verbs
        .iter()
        .map(|v| v.verb.as_str())
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Serialize)]
struct JsonExport<'a> {
    #[serde(flatten)]
    network: &'a NarrativeNetwork,
    communities: Option<&'a NodeTags>,
}

pub fn to_json(net: &NarrativeNetwork, communities: Option<&NodeTags>) -> String {
    let mut s = serde_json::to_string_pretty(&JsonExport {
        network: net,
        communities,
    })
    .expect("network serializes");
    s.push('\n');
    s
}

pub fn to_graphml(net: &NarrativeNetwork, communities: Option<&NodeTags>) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n");
    out.push_str("  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n");
    out.push_str(
        "  <key id=\"group\" for=\"node\" attr.name=\"supernode\" attr.type=\"string\"/>\n",
    );
    out.push_str(
        "  <key id=\"frequency\" for=\"node\" attr.name=\"frequency\" attr.type=\"long\"/>\n",
    );
    out.push_str(
        "  <key id=\"community\" for=\"node\" attr.name=\"community\" attr.type=\"string\"/>\n",
    );
    out.push_str("  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"long\"/>\n");
    out.push_str("  <key id=\"verbs\" for=\"edge\" attr.name=\"verbs\" attr.type=\"string\"/>\n");
    out.push_str("  <graph id=\"G\" edgedefault=\"directed\">\n");
    for n in &net.nodes {
        let _ = writeln!(out, "    <node id=\"{}\">", escape(&n.id));
        let _ = writeln!(out, "      <data key=\"label\">{}</data>", escape(&n.label));
        if let Some(g) = &n.group {
            let _ = writeln!(out, "      <data key=\"group\">{}</data>", escape(g));
        }
        let _ = writeln!(out, "      <data key=\"frequency\">{}</data>", n.frequency);
        if let Some(c) = communities.and_then(|c| c.get(&n.id)) {
            let _ = writeln!(out, "      <data key=\"community\">{}</data>", escape(c));
        }
        out.push_str("    </node>\n");
    }
    for (i, e) in net.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "    <edge id=\"e{i}\" source=\"{}\" target=\"{}\">",
            escape(&e.source),
            escape(&e.target)
        );
        let _ = writeln!(out, "      <data key=\"weight\">{}</data>", e.weight);
        let _ = writeln!(
            out,
            "      <data key=\"verbs\">{}</data>",
            escape(&verb_label(&e.verbs))
        );
        out.push_str("    </edge>\n");
    }
    out.push_str("  </graph>\n</graphml>\n");
    out
}

pub fn to_gexf(net: &NarrativeNetwork, communities: Option<&NodeTags>) -> String {
    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    out.push_str("<gexf xmlns=\"http://gexf.net/1.3\" version=\"1.3\">\n");
    out.push_str("  <graph defaultedgetype=\"directed\" mode=\"static\">\n");
    out.push_str("    <attributes class=\"node\">\n");
    out.push_str("      <attribute id=\"0\" title=\"supernode\" type=\"string\"/>\n");
    out.push_str("      <attribute id=\"1\" title=\"frequency\" type=\"long\"/>\n");
    out.push_str("      <attribute id=\"2\" title=\"community\" type=\"string\"/>\n");
    out.push_str("    </attributes>\n");
    out.push_str("    <attributes class=\"edge\">\n");
    out.push_str("      <attribute id=\"0\" title=\"verbs\" type=\"string\"/>\n");
    out.push_str("    </attributes>\n");
    out.push_str("    <nodes>\n");
    for n in &net.nodes {
        let _ = writeln!(
            out,
            "      <node id=\"{}\" label=\"{}\">",
            escape(&n.id),
            escape(&n.label)
        );
        out.push_str("        <attvalues>\n");
        if let Some(g) = &n.group {
            let _ = writeln!(
                out,
                "          <attvalue for=\"0\" value=\"{}\"/>",
                escape(g)
            );
        }
        let _ = writeln!(
            out,
            "          <attvalue for=\"1\" value=\"{}\"/>",
            n.frequency
        );
        if let Some(c) = communities.and_then(|c| c.get(&n.id)) {
            let _ = writeln!(
                out,
                "          <attvalue for=\"2\" value=\"{}\"/>",
                escape(c)
            );
        }
        out.push_str("        </attvalues>\n      </node>\n");
    }
    out.push_str("    </nodes>\n    <edges>\n");
    for (i, e) in net.edges.iter().enumerate() {
        let _ = writeln!(
            out,
            "      <edge id=\"{i}\" source=\"{}\" target=\"{}\" weight=\"{}\" label=\"{}\">",
            escape(&e.source),
            escape(&e.target),
            e.weight,
            escape(e.top_verb().unwrap_or(""))
        );
        let _ = writeln!(
            out,
            "        <attvalues><attvalue for=\"0\" value=\"{}\"/></attvalues>",
            escape(&verb_label(&e.verbs))
        );
        out.push_str("      </edge>\n");
    }
    out.push_str("    </edges>\n  </graph>\n</gexf>\n");
    out
}

pub fn nodes_csv(
    net: &NarrativeNetwork,
    communities: Option<&NodeTags>,
) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["id", "label", "supernode", "frequency", "community"])?;
    for n in &net.nodes {
        let freq = n.frequency.to_string();
        let community = communities
            .and_then(|c| c.get(&n.id))
            .map_or("", |c| c.as_str());
        w.write_record([
            &n.id,
            &n.label,
            n.group.as_deref().unwrap_or(""),
            &freq,
            community,
        ])?;
    }
    finish(w)
}

pub fn edges_csv(net: &NarrativeNetwork) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["source", "target", "weight", "verbs", "top_kl"])?;
    for e in &net.edges {
        let weight = e.weight.to_string();
        let kl = e
            .verbs
            .first()
            .map_or(String::new(), |v| format!("{:.6}", v.kl));
        w.write_record([&e.source, &e.target, &weight, &verb_label(&e.verbs), &kl])?;
    }
    finish(w)
}

fn finish(w: csv::Writer<Vec<u8>>) -> Result<String, csv::Error> {
    let bytes = w
        .into_inner()
        .map_err(|e| csv::Error::from(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
