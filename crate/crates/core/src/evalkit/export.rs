use std::io::{self, Write};

/// Writes one binary graymap (P5) of `values` laid out row-major over a
/// `width x height` image; values are clamped to [0, 1] and scaled to
/// [0, 255].
pub fn write_pgm(out: &mut impl Write, values: &[f64], width: usize, height: usize) -> io::Result<()> {
    if width * height != values.len() {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("{}x{} image cannot hold {} pixels", width, height, values.len()),
        ));
    }
    write!(out, "P5\n{width} {height}\n255\n")?;
    let bytes: Vec<u8> = values.iter().map(|v| (v.clamp(0.0, 1.0) * 255.0).round() as u8).collect();
    out.write_all(&bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_and_scaling() {
        let mut buf = Vec::new();
        write_pgm(&mut buf, &[0.0, 1.0, 0.5, 2.0, -1.0, 0.25], 3, 2).unwrap();
        let header = b"P5\n3 2\n255\n";
        assert_eq!(&buf[..header.len()], header);
        assert_eq!(&buf[header.len()..], &[0, 255, 128, 255, 0, 64]);
        assert!(write_pgm(&mut Vec::new(), &[0.0; 5], 3, 2).is_err());
    }
}
