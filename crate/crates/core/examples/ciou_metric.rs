//! Consensus IoU of a participant's boxes against several experts.

use avloop::eval::{ciou, consensus_map};
use avloop::model::{BoundingBox, FrameDims};

fn main() -> anyhow::Result<()> {
    let dims = FrameDims { width: 64, height: 48 };
    let b = |x, y, w, h| BoundingBox { x, y, w, h };
    let experts = vec![vec![b(10.0, 10.0, 20.0, 20.0)], vec![b(14.0, 12.0, 20.0, 18.0)], vec![b(12.0, 8.0, 16.0, 24.0)]];
    let tries = [
        ("tight", vec![b(12.0, 10.0, 20.0, 20.0)]),
        ("loose", vec![b(4.0, 4.0, 36.0, 34.0)]),
        ("wrong object", vec![b(40.0, 20.0, 16.0, 16.0)]),
        ("nothing", vec![]),
    ];
    for consensus in [1, 2, 3] {
        let map = consensus_map(&experts, dims, consensus)?;
        let row: Vec<String> = tries.iter().map(|(name, boxes)| format!("{name} {:.3}", ciou(boxes, &map))).collect();
        println!("consensus {consensus}: {}", row.join("  "));
    }
    Ok(())
}
