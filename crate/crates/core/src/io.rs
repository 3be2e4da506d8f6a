//! Image file I/O: PNG via the `image` crate, binary PPM (P6) natively.
//!
//! Loading converts to 8-bit RGB; saving rounds and clamps samples to
//! `[0,255]`. The format is picked from the file extension.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::plane::{ColorImage, ImagePlane};

/// Loads a PNG or binary PPM image as an 8-bit RGB `ColorImage`.
pub fn load_image(path: &Path) -> Result<ColorImage> {
    match extension(path).as_deref() {
        Some("ppm") | Some("pnm") => load_ppm(path),
        Some("png") => {
            let img = image::open(path)?.to_rgb8();
            let (w, h) = (img.width() as usize, img.height() as usize);
            from_rgb_bytes(img.as_raw(), w, h)
        }
        other => Err(Error::UnsupportedImage(format!(
            "extension {other:?} (expected png or ppm): {}",
            path.display()
        ))),
    }
}

/// Saves as PNG or binary PPM depending on the extension.
pub fn save_image(image: &ColorImage, path: &Path) -> Result<()> {
    let bytes = to_rgb_bytes(image);
    match extension(path).as_deref() {
        Some("ppm") | Some("pnm") => save_ppm(path, image.width(), image.height(), &bytes),
        Some("png") => {
            image::save_buffer(
                path,
                &bytes,
                image.width() as u32,
                image.height() as u32,
                image::ExtendedColorType::Rgb8,
            )?;
            Ok(())
        }
        other => Err(Error::UnsupportedImage(format!(
            "extension {other:?} (expected png or ppm): {}",
            path.display()
        ))),
    }
}

fn extension(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_lowercase())
}

fn from_rgb_bytes(bytes: &[u8], width: usize, height: usize) -> Result<ColorImage> {
    let mut planes: [Vec<f64>; 3] = std::array::from_fn(|_| Vec::with_capacity(width * height));
    for px in bytes.chunks_exact(3) {
        for (plane, &b) in planes.iter_mut().zip(px) {
            plane.push(f64::from(b));
        }
    }
    let [r, g, b] = planes;
    ColorImage::new([
        ImagePlane::new(width, height, r)?,
        ImagePlane::new(width, height, g)?,
        ImagePlane::new(width, height, b)?,
    ])
}

fn to_rgb_bytes(image: &ColorImage) -> Vec<u8> {
    let n = image.pixel_count();
    let mut bytes = Vec::with_capacity(n * 3);
    let [r, g, b] = image.planes();
    for i in 0..n {
        for plane in [r, g, b] {
            bytes.push(plane.samples()[i].round().clamp(0.0, 255.0) as u8);
        }
    }
    bytes
}

fn save_ppm(path: &Path, width: usize, height: usize, rgb: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path)?;
    write!(f, "P6\n{width} {height}\n255\n")?;
    f.write_all(rgb)?;
    Ok(())
}

fn load_ppm(path: &Path) -> Result<ColorImage> {
    let data = fs::read(path)?;
    let mut pos = 0usize;

    let mut token = |data: &[u8]| -> Result<String> {
        // Skip whitespace and '#' comments between header fields.
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::UnsupportedImage("truncated PPM header".into()));
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };

    if token(&data)? != "P6" {
        return Err(Error::UnsupportedImage("not a binary P6 PPM".into()));
    }
    let width: usize = token(&data)?
        .parse()
        .map_err(|_| Error::UnsupportedImage("bad PPM width".into()))?;
    let height: usize = token(&data)?
        .parse()
        .map_err(|_| Error::UnsupportedImage("bad PPM height".into()))?;
    let maxval: u32 = token(&data)?
        .parse()
        .map_err(|_| Error::UnsupportedImage("bad PPM maxval".into()))?;
    if maxval != 255 {
        return Err(Error::UnsupportedImage(format!(
            "PPM maxval {maxval} unsupported (8-bit only)"
        )));
    }
    pos += 1; // single whitespace after header
    let need = width * height * 3;
    if data.len() < pos + need {
        return Err(Error::UnsupportedImage("truncated PPM pixel data".into()));
    }
    from_rgb_bytes(&data[pos..pos + need], width, height)
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn sample() -> ColorImage {
        ColorImage::new([
            ImagePlane::from_fn(5, 4, |r, c| (r * 5 + c) as f64),
            ImagePlane::from_fn(5, 4, |r, c| (100 + r * 5 + c) as f64),
            ImagePlane::from_fn(5, 4, |r, c| (200 + r + c) as f64),
        ])
        .unwrap()
    }

    #[test]
    fn ppm_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.ppm");
        let img = sample();
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn png_round_trip() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.png");
        let img = sample();
        save_image(&img, &path).unwrap();
        let back = load_image(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn ppm_header_comments_are_skipped() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("c.ppm");
        let mut bytes = b"P6\n# a comment\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[10, 20, 30, 40, 50, 60]);
        fs::write(&path, bytes).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.width(), 2);
        assert_eq!(img.planes()[2].get(0, 1), 60.0);
    }

    #[test]
    fn rejects_unknown_extension_and_bad_ppm() {
        let dir = tempdir().unwrap();
        assert!(load_image(&dir.path().join("x.bmp")).is_err());
        let path = dir.path().join("bad.ppm");
        fs::write(&path, b"P5\n2 2\n255\n").unwrap();
        assert!(load_image(&path).is_err());
    }
}
