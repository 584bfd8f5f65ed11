//! Transfer-matrix environments `E[w][bra][ket]` and the middle-index
//! operator kernel shared by expectation values and the DMRG matvecs.

use faer::{MatMut, MatRef, Par};

use crate::mpo::{LocalOp, MpoSite};
use crate::tensor::{gemm_into, Tensor3};

#[derive(Clone, Debug, PartialEq)]
pub struct Env {
    pub w: usize,
    pub bra: usize,
    pub ket: usize,
    pub data: Vec<f64>,
}

impl Env {
    /// Boundary environment: a single 1×1×1 block equal to one.
    pub fn boundary() -> Env {
        Env {
            w: 1,
            bra: 1,
            ket: 1,
            data: vec![1.0],
        }
    }

    pub fn block(&self, w: usize) -> &[f64] {
        let n = self.bra * self.ket;
        &self.data[w * n..(w + 1) * n]
    }

    pub fn block_mat(&self, w: usize) -> MatRef<'_, f64> {
        MatRef::from_row_major_slice(self.block(w), self.bra, self.ket)
    }
}

/// `dst[o][out][i] (+)= Σ_in op[out][in]·src[o][in][i]`.
pub fn apply_middle(op: &LocalOp, src: &[f64], dst: &mut [f64], outer: usize, d_in: usize, d_out: usize, inner: usize, par: Par) {
    match op {
        LocalOp::Identity => {
            debug_assert_eq!(d_in, d_out);
            dst.iter_mut().zip(src).for_each(|(a, b)| *a += b);
        }
        LocalOp::Dense(m) => {
            let opm = MatRef::from_row_major_slice(m, d_out, d_in);
            for o in 0..outer {
                let s = &src[o * d_in * inner..(o + 1) * d_in * inner];
                let d = &mut dst[o * d_out * inner..(o + 1) * d_out * inner];
                gemm_into(
                    MatMut::from_row_major_slice_mut(d, d_out, inner),
                    opm,
                    MatRef::from_row_major_slice(s, d_in, inner),
                    true,
                    par,
                );
            }
        }
    }
}

/// Absorb one site into a left environment.
pub fn extend_left(env: &Env, bra: &Tensor3, w: &MpoSite, ket: &Tensor3, par: Par) -> Env {
    debug_assert_eq!(env.bra, bra.dl);
    debug_assert_eq!(env.ket, ket.dl);
    let (dbl, dkl) = (bra.dl, ket.dl);
    let (d, dkr, dbr) = (ket.d, ket.dr, bra.dr);
    let tsize = dbl * d * dkr;

    // T[w][a'][s][b] = Σ_a L[w][a'][a] ket[a][s][b]
    let mut t = vec![0.0; env.w * tsize];
    for wi in 0..env.w {
        gemm_into(
            MatMut::from_row_major_slice_mut(&mut t[wi * tsize..(wi + 1) * tsize], dbl, d * dkr),
            env.block_mat(wi),
            ket.right_mat(),
            false,
            par,
        );
    }
    debug_assert_eq!(dkl, ket.dl);

    // U[w'][a'][s'][b] = Σ op[s'][s] T[w][a'][s][b]
    let usize_ = dbl * bra.d * dkr;
    let mut u = vec![0.0; w.wr * usize_];
    for term in &w.terms {
        apply_middle(
            &term.op,
            &t[term.left * tsize..(term.left + 1) * tsize],
            &mut u[term.right * usize_..(term.right + 1) * usize_],
            dbl,
            d,
            bra.d,
            dkr,
            par,
        );
    }

    // L'[w'][b'][b] = Σ_{a',s'} bra[a'][s'][b'] U[w'][a'][s'][b]
    let nsize = dbr * dkr;
    let mut out = vec![0.0; w.wr * nsize];
    for wi in 0..w.wr {
        gemm_into(
            MatMut::from_row_major_slice_mut(&mut out[wi * nsize..(wi + 1) * nsize], dbr, dkr),
            bra.left_mat().transpose(),
            MatRef::from_row_major_slice(&u[wi * usize_..(wi + 1) * usize_], dbl * bra.d, dkr),
            false,
            par,
        );
    }
    Env {
        w: w.wr,
        bra: dbr,
        ket: dkr,
        data: out,
    }
}

/// Absorb one site into a right environment.
pub fn extend_right(env: &Env, bra: &Tensor3, w: &MpoSite, ket: &Tensor3, par: Par) -> Env {
    debug_assert_eq!(env.bra, bra.dr);
    debug_assert_eq!(env.ket, ket.dr);
    let (dkl, d, dkr) = (ket.dl, ket.d, ket.dr);
    let (dbl, dbr) = (bra.dl, bra.dr);
    let tsize = dkl * d * dbr;

    // T[w'][a][s][b'] = Σ_b ket[a][s][b] R[w'][b'][b]
    let mut t = vec![0.0; env.w * tsize];
    for wi in 0..env.w {
        gemm_into(
            MatMut::from_row_major_slice_mut(&mut t[wi * tsize..(wi + 1) * tsize], dkl * d, dbr),
            ket.left_mat(),
            env.block_mat(wi).transpose(),
            false,
            par,
        );
    }
    debug_assert_eq!(dkr, ket.dr);

    let usize_ = dkl * bra.d * dbr;
    let mut u = vec![0.0; w.wl * usize_];
    for term in &w.terms {
        apply_middle(
            &term.op,
            &t[term.right * tsize..(term.right + 1) * tsize],
            &mut u[term.left * usize_..(term.left + 1) * usize_],
            dkl,
            d,
            bra.d,
            dbr,
            par,
        );
    }

    // R'[w][a'][a] = Σ_{s',b'} bra[a'][s'][b'] U[w][a][s'][b']
    let nsize = dbl * dkl;
    let mut out = vec![0.0; w.wl * nsize];
    for wi in 0..w.wl {
        gemm_into(
            MatMut::from_row_major_slice_mut(&mut out[wi * nsize..(wi + 1) * nsize], dbl, dkl),
            bra.right_mat(),
            MatRef::from_row_major_slice(&u[wi * usize_..(wi + 1) * usize_], dkl, bra.d * dbr).transpose(),
            false,
            par,
        );
    }
    Env {
        w: w.wl,
        bra: dbl,
        ket: dkl,
        data: out,
    }
}
