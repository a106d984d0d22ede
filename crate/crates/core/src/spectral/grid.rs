use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans_for(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

/// Uniform `n x n` collocation grid on the unit torus `[0,1)^2`.
///
/// Storage is row-major with the first index along `x`: sample `(i, j)` sits at
/// `(i/n, j/n)` and lives at offset `i * n + j`. Spectral arrays use the same
/// layout, with index `i` standing for the signed wavenumber returned by
/// [`Grid::wavenumber`].
#[derive(Clone)]
pub struct Grid {
    n: usize,
    plans: Arc<Plans>,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self {
            n,
            plans: plans_for(n),
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of grid points (and of spectral coefficients).
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `1/n`.
    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / self.n as f64
    }

    /// Largest retained wavenumber per axis under the two-thirds rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n / 3) as i64
    }

    /// Signed wavenumber in `{-n/2+1, ..., n/2}` for array index `i`.
    #[inline]
    pub fn wavenumber(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Array index for the signed wavenumber `k` (taken modulo `n`).
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    #[inline]
    pub fn flat_index(&self, k1: i64, k2: i64) -> usize {
        self.index_of(k1) * self.n + self.index_of(k2)
    }

    /// Wavevector for a flat spectral index.
    #[inline]
    pub fn wavevector(&self, flat: usize) -> (i64, i64) {
        (self.wavenumber(flat / self.n), self.wavenumber(flat % self.n))
    }

    /// True when either component sits on the Nyquist wavenumber `n/2`.
    #[inline]
    pub fn is_nyquist(&self, flat: usize) -> bool {
        let half = self.n / 2;
        flat / self.n == half || flat % self.n == half
    }

    pub(crate) fn ensure_same(&self, other: &Grid) -> Result<()> {
        if self.n != other.n {
            return Err(Error::GridMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// Unnormalized 2D transform in place: forward uses `exp(-2 pi i k.x)`.
    pub(crate) fn fft2(&self, data: &mut [Complex64], inverse: bool) {
        debug_assert_eq!(data.len(), self.len());
        let n = self.n;
        let fft = if inverse {
            &self.plans.inverse
        } else {
            &self.plans.forward
        };
        // rows are contiguous: transform along y
        fft.process(data);
        let mut scratch = vec![Complex64::default(); data.len()];
        transpose(data, &mut scratch, n);
        fft.process(&mut scratch);
        transpose(&scratch, data, n);
    }
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], n: usize) {
    for i in 0..n {
        for j in 0..n {
            dst[j * n + i] = src[i * n + j];
        }
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
    }
}

impl Eq for Grid {}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid").field("n", &self.n).finish()
    }
}
