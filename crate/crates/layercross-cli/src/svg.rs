//! Deterministic SVG rendering of layered drawings: vertex (layer i,
//! position j) at x = 60j, y = 80(h - i), straight-line edges, and the
//! crossing total annotated. Identical inputs produce identical bytes.

use layercross::{count_crossings, Drawing, LayeredGraph};

pub fn render_svg(graph: &LayeredGraph, drawing: &Drawing) -> Result<String, String> {
    drawing
        .validate_for(graph)
        .map_err(|e| format!("drawing does not fit the graph: {e}"))?;
    let report = count_crossings(graph, drawing).expect("validated drawing");
    let h = graph.h() as i64;
    let pos = drawing.positions(graph);
    let coord = |v: layercross::VertexId| {
        let layer = graph.layer_of(v) as i64;
        let j = pos[v.index()] as i64 + 1;
        (60 * j, 80 * (h - layer) + 40)
    };
    let width = 60 * (drawing.orders.iter().map(|o| o.len()).max().unwrap_or(1) as i64 + 1);
    let height = 80 * h + 40;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    ));
    for e in graph.edges() {
        let (x1, y1) = coord(e.u);
        let (x2, y2) = coord(e.v);
        out.push_str(&format!(
            "  <line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" stroke=\"black\" stroke-width=\"{}\"/>\n",
            if e.mult > 1 { 3 } else { 1 }
        ));
    }
    for v in graph.vertices() {
        let (x, y) = coord(v);
        out.push_str(&format!(
            "  <circle cx=\"{x}\" cy=\"{y}\" r=\"6\" fill=\"white\" stroke=\"black\"/>\n"
        ));
        out.push_str(&format!(
            "  <text x=\"{x}\" y=\"{}\" font-size=\"10\" text-anchor=\"middle\">{v}</text>\n",
            y - 10
        ));
    }
    out.push_str(&format!(
        "  <text x=\"10\" y=\"{}\" font-size=\"14\">crossings: {}</text>\n",
        height - 10,
        report.total
    ));
    out.push_str("</svg>\n");
    Ok(out)
}
