//! Grid tiling of an image into a patch tree, with and without overlap.
//!
//!     cargo run --example patch_hierarchy

use lgssc::hierarchy::build_hierarchy;

fn main() -> lgssc::Result<()> {
    for (p, overlap) in [(4, 0.0), (9, 0.0), (4, 0.25)] {
        let h = build_hierarchy(48, 42, 3, p, overlap)?;
        println!("48x42, p={p}, overlap={overlap}: {} nodes", h.node_count());
        for (l, nodes) in h.nodes_by_level().iter().enumerate() {
            let sizes: Vec<String> = nodes
                .iter()
                .take(4)
                .map(|n| format!("{}x{}@({},{})", n.rect.height, n.rect.width, n.rect.top, n.rect.left))
                .collect();
            let more = if nodes.len() > 4 { " ..." } else { "" };
            println!("  level {}: {} patch(es) {}{more}", l + 1, nodes.len(), sizes.join(" "));
        }
        assert!(h.check_consistency());
    }
    Ok(())
}
