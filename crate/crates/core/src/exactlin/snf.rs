use super::RMatrix;

/// Smith form U·M·V = D over Z/p^N with D diagonal of nondecreasing valuation.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: RMatrix,
    pub v: RMatrix,
    pub v_inv: RMatrix,
    /// Valuations of the diagonal entries (N for a zero entry), length min(rows, cols).
    pub diag: Vec<u32>,
}

fn swap_rows(m: &mut RMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..m.cols() {
        let t = m.get(a, j);
        m.set(a, j, m.get(b, j));
        m.set(b, j, t);
    }
}

fn swap_cols(m: &mut RMatrix, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..m.rows() {
        let t = m.get(i, a);
        m.set(i, a, m.get(i, b));
        m.set(i, b, t);
    }
}

// row_dst -= c * row_src
fn row_axpy(m: &mut RMatrix, dst: usize, src: usize, c: u64) {
    let r = m.ring();
    for j in 0..m.cols() {
        let v = r.sub(m.get(dst, j), r.mul(c, m.get(src, j)));
        m.set(dst, j, v);
    }
}

fn col_axpy(m: &mut RMatrix, dst: usize, src: usize, c: u64) {
    let r = m.ring();
    for i in 0..m.rows() {
        let v = r.sub(m.get(i, dst), r.mul(c, m.get(i, src)));
        m.set(i, dst, v);
    }
}

fn scale_row(m: &mut RMatrix, i: usize, c: u64) {
    let r = m.ring();
    for j in 0..m.cols() {
        m.set(i, j, r.mul(c, m.get(i, j)));
    }
}

pub fn smith(m: &RMatrix) -> Smith {
    let ring = m.ring();
    let (rows, cols) = (m.rows(), m.cols());
    let mut d = m.clone();
    let mut u = RMatrix::identity(ring, rows);
    let mut v = RMatrix::identity(ring, cols);
    let mut vi = RMatrix::identity(ring, cols);
    let mut diag = Vec::new();
    for k in 0..rows.min(cols) {
        let mut best: Option<(usize, usize, u32)> = None;
        for i in k..rows {
            for j in k..cols {
                let x = d.get(i, j);
                if x != 0 {
                    let val = ring.val(x);
                    if best.map_or(true, |b| val < b.2) {
                        best = Some((i, j, val));
                    }
                }
            }
        }
        let Some((bi, bj, val)) = best else {
            diag.extend(std::iter::repeat(ring.exp()).take(rows.min(cols) - k));
            break;
        };
        swap_rows(&mut d, k, bi);
        swap_rows(&mut u, k, bi);
        swap_cols(&mut d, k, bj);
        swap_cols(&mut v, k, bj);
        swap_rows(&mut vi, k, bj);
        let (_, unit) = ring.split(d.get(k, k));
        let uinv = ring.inv(unit % ring.modulus()).expect("unit");
        scale_row(&mut d, k, uinv);
        scale_row(&mut u, k, uinv);
        let pv = ring.pow_p(val);
        for i in 0..rows {
            if i != k && d.get(i, k) != 0 {
                let c = d.get(i, k) / pv;
                row_axpy(&mut d, i, k, c);
                row_axpy(&mut u, i, k, c);
            }
        }
        for j in 0..cols {
            if j != k && d.get(k, j) != 0 {
                let c = d.get(k, j) / pv;
                col_axpy(&mut d, j, k, c);
                col_axpy(&mut v, j, k, c);
                // V ← V·E with E = I - c e_k e_j; E^{-1} = I + c e_k e_j acts on rows of V^{-1}
                for t in 0..cols {
                    let nv = ring.add(vi.get(k, t), ring.mul(c, vi.get(j, t)));
                    vi.set(k, t, nv);
                }
            }
        }
        diag.push(val);
    }
    Smith { u, v, v_inv: vi, diag }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactlin::Ring;

    #[test]
    fn transforms_diagonalize() {
        let r = Ring::new(3, 3).unwrap();
        let m = RMatrix::from_i64_rows(r, 3, &[vec![3, 6, 9], vec![1, 2, 4], vec![9, 0, 18]]).unwrap();
        let s = smith(&m);
        let d = s.u.mul(&m).unwrap().mul(&s.v).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(d.get(i, j), 0);
                } else {
                    assert_eq!(d.get(i, i), r.pow_p(s.diag[i]));
                }
            }
        }
        assert_eq!(s.v.mul(&s.v_inv).unwrap(), RMatrix::identity(r, 3));
        assert!(s.diag.windows(2).all(|w| w[0] <= w[1]));
    }
}
