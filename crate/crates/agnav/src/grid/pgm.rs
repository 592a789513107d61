//! Binary PGM (P5) export with a map_server-style metadata sidecar.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Cell, GridError, OccupancyGrid};

pub const FREE_VALUE: u8 = 254;
pub const OCCUPIED_VALUE: u8 = 0;

/// Writes `<prefix>.pgm` and `<prefix>.meta`. The image stores the top
/// grid row first (image convention), free cells as 254, occupied as 0.
/// Output bytes are a pure function of the grid.
pub fn export_pgm(grid: &OccupancyGrid, path_prefix: &str) -> Result<(), GridError> {
    let pgm_path = format!("{path_prefix}.pgm");
    if let Some(dir) = Path::new(&pgm_path).parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)?;
        }
    }

    let mut body = Vec::with_capacity(grid.width * grid.height + 32);
    body.extend_from_slice(format!("P5\n{} {}\n255\n", grid.width, grid.height).as_bytes());
    for row in (0..grid.height as i64).rev() {
        for col in 0..grid.width as i64 {
            body.push(match grid.get(col, row) {
                Cell::Free => FREE_VALUE,
                Cell::Occupied => OCCUPIED_VALUE,
            });
        }
    }
    fs::File::create(&pgm_path)?.write_all(&body)?;

    let meta = format!(
        "resolution: {}\norigin_x: {}\norigin_y: {}\nfree_value: {FREE_VALUE}\noccupied_value: {OCCUPIED_VALUE}\n",
        grid.resolution, grid.origin.x, grid.origin.y
    );
    fs::write(format!("{path_prefix}.meta"), meta)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::LocalPoint;

    #[test]
    fn tiny_grids_encode_directly() {
        let dir = std::env::temp_dir().join("agnav_pgm_test");
        std::fs::create_dir_all(&dir).unwrap();

        let free2 = OccupancyGrid::filled(0.1, LocalPoint::new(0.0, 0.0), 2, 2, Cell::Free);
        let prefix = dir.join("free2").to_string_lossy().into_owned();
        export_pgm(&free2, &prefix).unwrap();
        let bytes = std::fs::read(format!("{prefix}.pgm")).unwrap();
        assert_eq!(&bytes[bytes.len() - 4..], &[254, 254, 254, 254]);

        let occ1 = OccupancyGrid::filled(0.1, LocalPoint::new(0.0, 0.0), 1, 1, Cell::Occupied);
        let prefix = dir.join("occ1").to_string_lossy().into_owned();
        export_pgm(&occ1, &prefix).unwrap();
        let bytes = std::fs::read(format!("{prefix}.pgm")).unwrap();
        assert_eq!(bytes[bytes.len() - 1], 0);
    }

    #[test]
    fn export_is_deterministic() {
        let dir = std::env::temp_dir().join("agnav_pgm_det");
        std::fs::create_dir_all(&dir).unwrap();
        let mut g = OccupancyGrid::filled(0.05, LocalPoint::new(-1.0, 2.0), 7, 5, Cell::Free);
        g.set(3, 2, Cell::Occupied);
        let p1 = dir.join("a").to_string_lossy().into_owned();
        let p2 = dir.join("b").to_string_lossy().into_owned();
        export_pgm(&g, &p1).unwrap();
        export_pgm(&g, &p2).unwrap();
        assert_eq!(
            std::fs::read(format!("{p1}.pgm")).unwrap(),
            std::fs::read(format!("{p2}.pgm")).unwrap()
        );
        assert_eq!(
            std::fs::read(format!("{p1}.meta")).unwrap(),
            std::fs::read(format!("{p2}.meta")).unwrap()
        );
    }
}
