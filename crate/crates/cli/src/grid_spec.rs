use hschwarz::grid::radii_up_to;
use hschwarz::Grid;
use num_complex::Complex64;

use crate::CliError;

/// Polar sample grid requested on the command line.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub radii: Vec<f64>,
    pub angles: usize,
    pub extra: Vec<Complex64>,
    /// Points farther out than this are dropped.
    pub max_radius: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { radii: radii_up_to(0.1, 0.8), angles: 16, extra: Vec::new(), max_radius: 0.8 }
    }
}

impl GridSpec {
    pub fn to_grid(&self) -> Result<Grid, CliError> {
        if self.angles == 0 {
            return Err(CliError::Input("--grid-angles must be positive".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && **r < 1.0)) {
            return Err(CliError::Input(format!("grid radius {r} is not in (0, 1)")));
        }
        let grid = Grid::polar(&self.radii, self.angles, &self.extra)
            .map_err(|e| CliError::Input(format!("grid: {e}")))?
            .truncated(self.max_radius);
        if grid.is_empty() {
            return Err(CliError::Input("grid is empty".into()));
        }
        Ok(grid)
    }
}

/// A comma-separated radius list as one command-line value.
#[derive(Debug, Clone, PartialEq)]
pub struct Radii(pub Vec<f64>);

/// `"0.1,0.2,0.3"`.
pub fn parse_radii(s: &str) -> Result<Radii, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"))).collect::<Result<_, _>>().map(Radii)
}

/// `"re,im"`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re, im] => {
            let re = re.trim().parse::<f64>().map_err(|e| format!("`{re}`: {e}"))?;
            let im = im.trim().parse::<f64>().map_err(|e| format!("`{im}`: {e}"))?;
            Ok(Complex64::new(re, im))
        }
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_matches_standard_grid() {
        assert_eq!(GridSpec::default().to_grid().unwrap(), Grid::standard());
    }

    #[test]
    fn max_radius_and_extras() {
        let spec = GridSpec {
            radii: vec![0.2, 0.9],
            angles: 4,
            extra: vec![Complex64::new(0.0, 0.0)],
            max_radius: 0.5,
        };
        assert_eq!(spec.to_grid().unwrap().len(), 5);
        let bad = GridSpec { radii: vec![1.0], ..GridSpec::default() };
        assert!(bad.to_grid().is_err());
    }

    #[test]
    fn parsing() {
        assert_eq!(parse_radii("0.1, 0.5").unwrap(), Radii(vec![0.1, 0.5]));
        assert!(parse_radii("0.1,x").is_err());
        assert_eq!(parse_complex("0.3,-0.2").unwrap(), Complex64::new(0.3, -0.2));
        assert!(parse_complex("0.3").is_err());
    }
}
