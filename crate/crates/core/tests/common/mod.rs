//! Fixtures shared by the integration tests and the acceptance harness.

#![allow(dead_code)]

use surfmap::bijection::Mobile;
use surfmap::mapcore::{CombinatorialMap, FaceColoring};

/// A planar 3-constellation drawn by hand: two black triangles `abc` and `ade`
/// touching at `a`, and one white hexagon around them. Darts `xy` (from `x`
/// towards `y`, black on the right) are odd, their partners even:
/// ab=1 ba=2 bc=3 cb=4 ca=5 ac=6 ad=7 da=8 de=9 ed=10 ea=11 ae=12. With
/// `a` at the origin, `b = (−1,−1)`, `c = (−1,1)`, `d = (1,1)`, `e = (1,−1)`,
/// counterclockwise order gives the rotations below. Rooted at `bc`, pointed at `b`.
pub const BOWTIE_MAP: &str = "\
darts 12
sigma 12 3 2 5 4 1 6 9 8 11 10 7
alpha 2 1 4 3 6 5 8 7 10 9 12 11
root 3
pointed 2
";

/// Its mobile, derived by hand. Distances from `b` along oriented edges are
/// b=0 c=1 a=2 d=3 e=4; `ab` and `ea` drop by 2 and become flagged edges to the
/// black centres, the other four edges rise by 1 and join the white centre `w`
/// to their upper end. Around `w`, in contour order: β₁, c, a, d, e, β₂ (darts
/// 1–6, leaves 7–12). The root edge `bc` gives the edge `w→c` and the shift 1.
/// Flags read (left, right) walking away from `w`: (b, a) = (−1, 1) and
/// (a, e) = (1, 3).
pub const BOWTIE_MOBILE: &str = "\
darts 12
sigma 2 3 4 5 6 1 7 8 9 10 11 12
alpha 7 8 9 10 11 12 1 2 3 4 5 6
root 2
vtype W B L0 L1 L2 L3 B
flags 1 -1 1
flags 6 1 3
";

pub fn bowtie() -> (CombinatorialMap, FaceColoring, Mobile) {
    let map: CombinatorialMap = BOWTIE_MAP.parse().expect("hand-encoded map parses");
    let col = FaceColoring::from_darts((0..12).map(|d| d % 2 == 0).collect());
    let mobile: Mobile = BOWTIE_MOBILE.parse().expect("hand-encoded mobile parses");
    (map, col, mobile)
}
