//! Capacity of k collinear faces: the least perimeter of a set covering them.

use perivar::grid::{FaceSet, GridDomain};
use perivar::ic::{capacity, CapacityTarget};

fn main() -> perivar::error::Result<()> {
    for k in 1..=8usize {
        let g = GridDomain::new(&[k + 2, 3])?;
        let faces = FaceSet::from_ids(&g, (1..=k).filter_map(|x| g.face_at(1, 1, &[x])))?;
        let r = capacity(&CapacityTarget::faces(faces))?;
        println!("k={k}: capacity {} ({} nodes)", r.value, r.nodes);
    }
    Ok(())
}
