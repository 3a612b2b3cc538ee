use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Index, Mul, Sub};

/// A point of R^n, 1 <= n <= 3. Unused trailing coordinates are zero.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; 3],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Self {
        assert!(
            (1..=3).contains(&coords.len()),
            "points have 1 to 3 coordinates, got {}",
            coords.len()
        );
        let mut c = [0.0; 3];
        c[..coords.len()].copy_from_slice(coords);
        Point {
            coords: c,
            dim: coords.len() as u8,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Point::new(&[0.0; 3][..dim])
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim()]
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        match self.dim {
            1 => self.coords[0] * other.coords[0],
            2 => self.coords[0] * other.coords[0] + self.coords[1] * other.coords[1],
            _ => {
                self.coords[0] * other.coords[0]
                    + self.coords[1] * other.coords[1]
                    + self.coords[2] * other.coords[2]
            }
        }
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.dot(self))
    }

    pub fn dist(&self, other: &Point) -> f64 {
        (*self - *other).norm()
    }

    /// Largest absolute coordinate difference.
    pub fn cheb_dist(&self, other: &Point) -> f64 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Lexicographic order by coordinates.
    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.coords().iter().zip(other.coords()) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                o => return o,
            }
        }
        self.dim.cmp(&other.dim)
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords()[i]
    }
}

impl Add for Point {
    type Output = Point;

    fn add(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..3 {
            self.coords[i] += rhs.coords[i];
        }
        self
    }
}

impl Sub for Point {
    type Output = Point;

    fn sub(mut self, rhs: Point) -> Point {
        debug_assert_eq!(self.dim, rhs.dim);
        for i in 0..3 {
            self.coords[i] -= rhs.coords[i];
        }
        self
    }
}

impl Mul<f64> for Point {
    type Output = Point;

    fn mul(mut self, s: f64) -> Point {
        for c in &mut self.coords {
            *c *= s;
        }
        self
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Point {
        Point::new(&[x])
    }
}

impl From<[f64; 2]> for Point {
    fn from(p: [f64; 2]) -> Point {
        Point::new(&p)
    }
}

impl From<[f64; 3]> for Point {
    fn from(p: [f64; 3]) -> Point {
        Point::new(&p)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.coords()).finish()
    }
}
