use num_complex::Complex64;

use super::{to_origin, Circle, DoublePacking, Model};
use crate::error::{Error, Result};
use crate::graph::{PlaneNetwork, VertexId};

/// Hyperbolic distance from 0 to the real point `t` (curvature -1).
fn d0(t: f64) -> f64 {
    ((1.0 + t) / (1.0 - t)).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicCircle {
    pub centre: Complex64,
    pub radius: f64,
}

/// Hyperbolic centre and radius of the Euclidean disc `(z, r)`.
pub fn hyperbolic_circle(z: Complex64, r: f64) -> Result<HyperbolicCircle> {
    let m = z.norm();
    if !(r > 0.0) || m + r >= 1.0 {
        return Err(Error::Packing(format!(
            "disc with centre {z} and radius {r} is not inside the open unit disc"
        )));
    }
    let (far, near) = (d0(m + r), d0(m - r));
    let s = (far + near) / 2.0;
    let dir = if m > 0.0 {
        z / m
    } else {
        Complex64::new(1.0, 0.0)
    };
    Ok(HyperbolicCircle {
        centre: dir * (s / 2.0).tanh(),
        radius: (far - near) / 2.0,
    })
}

pub fn hyperbolic_radius(z: Complex64, r: f64) -> Result<f64> {
    Ok(hyperbolic_circle(z, r)?.radius)
}

pub fn hyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
    let q = (z - w).norm() / (Complex64::new(1.0, 0.0) - z.conj() * w).norm();
    2.0 * q.min(1.0).atanh()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicStats {
    /// `1 - |z(v)|` for the Euclidean centre.
    pub sigma: f64,
    pub radius: f64,
    pub area: f64,
    pub centre: Complex64,
}

fn disc_area(radius: f64) -> f64 {
    4.0 * std::f64::consts::PI * (radius / 2.0).sinh().powi(2)
}

/// Per-vertex hyperbolic data; `None` for horocycles.
pub fn hyperbolic_stats(p: &DoublePacking) -> Result<Vec<Option<HyperbolicStats>>> {
    if p.model != Model::UnitDisc {
        return Err(Error::Packing(
            "hyperbolic statistics need a disc packing".into(),
        ));
    }
    p.primal
        .iter()
        .zip(&p.horocycle)
        .map(|(c, &h)| {
            if h {
                return Ok(None);
            }
            let hc = hyperbolic_circle(c.centre, c.radius)?;
            Ok(Some(HyperbolicStats {
                sigma: 1.0 - c.centre.norm(),
                radius: hc.radius,
                area: disc_area(hc.radius),
                centre: hc.centre,
            }))
        })
        .collect()
}

fn stats_of(stats: &[Option<HyperbolicStats>], v: VertexId) -> Result<HyperbolicStats> {
    stats
        .get(v)
        .copied()
        .flatten()
        .ok_or_else(|| Error::Packing(format!("vertex {v} has no finite hyperbolic circle")))
}

/// Total hyperbolic area of the primal discs of `set`.
pub fn hyperbolic_area(stats: &[Option<HyperbolicStats>], set: &[VertexId]) -> Result<f64> {
    set.iter().map(|&v| Ok(stats_of(stats, v)?.area)).sum()
}

const BRUTE_FORCE_LIMIT: usize = 2000;

/// Hyperbolic diameter of the hyperbolic centres of `set`; 0 when empty.
/// Exact up to 2000 points; above that a repeated farthest-point sweep,
/// which returns a lower bound that is usually exact.
pub fn hyperbolic_diam(stats: &[Option<HyperbolicStats>], set: &[VertexId]) -> Result<f64> {
    let pts: Vec<Complex64> = set
        .iter()
        .map(|&v| Ok(stats_of(stats, v)?.centre))
        .collect::<Result<_>>()?;
    if pts.len() < 2 {
        return Ok(0.0);
    }
    if pts.len() <= BRUTE_FORCE_LIMIT {
        let mut best: f64 = 0.0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                best = best.max(hyperbolic_distance(pts[i], pts[j]));
            }
        }
        return Ok(best);
    }
    let farthest = |from: Complex64| {
        pts.iter()
            .map(|&q| (hyperbolic_distance(from, q), q))
            .fold((0.0, from), |a, b| if b.0 > a.0 { b } else { a })
    };
    let mut best: f64 = 0.0;
    let mut anchor = pts[0];
    for _ in 0..4 {
        let (d, q) = farthest(anchor);
        if d <= best {
            break;
        }
        best = d;
        anchor = q;
    }
    Ok(best)
}

/// Image of a circle inside the unit disc under `z -> (z - a)/(1 - conj(a) z)`.
fn map_circle(a: Complex64, c: Circle) -> Circle {
    if a.norm() == 0.0 {
        return c;
    }
    // the line through the centre and the pole maps to a diameter line of
    // the image circle
    let pole = Complex64::new(1.0, 0.0) / a.conj();
    let u = (pole - c.centre) / (pole - c.centre).norm();
    let p = to_origin(a, c.centre + u * c.radius);
    let q = to_origin(a, c.centre - u * c.radius);
    Circle {
        centre: (p + q) / 2.0,
        radius: (p - q).norm() / 2.0,
    }
}

/// Moves the tangency point of the circles of `x` and `y` to the origin with
/// `z(x)` on the negative and `z(y)` on the positive real axis. Disc
/// packings use a disc automorphism; plane packings a similarity that also
/// sets `|z(y) - z(x)| = 1`.
pub fn mobius_normalize(
    p: &DoublePacking,
    net: &PlaneNetwork,
    x: VertexId,
    y: VertexId,
) -> Result<DoublePacking> {
    if x >= net.vertex_count() || y >= net.vertex_count() || net.find_dart(x, y).is_none() {
        return Err(Error::NotAnEdge(format!("({x}, {y})")));
    }
    let (cx, cy) = (p.primal[x], p.primal[y]);
    let axis = (cy.centre - cx.centre) / (cy.centre - cx.centre).norm();
    let t = cx.centre + axis * cx.radius;
    let mut out = p.clone();
    match p.model {
        Model::UnitDisc => {
            let mapped_y = map_circle(t, cy);
            let rot = (mapped_y.centre / mapped_y.centre.norm()).conj();
            let f = |c: Circle| {
                let m = map_circle(t, c);
                Circle {
                    centre: m.centre * rot,
                    radius: m.radius,
                }
            };
            out.primal = p.primal.iter().map(|&c| f(c)).collect();
            out.dual = p.dual.iter().map(|c| c.map(f)).collect();
        }
        Model::EuclideanPlane => {
            let scale = 1.0 / (cy.centre - cx.centre).norm();
            let rot = axis.conj();
            let f = |c: Circle| Circle {
                centre: (c.centre - t) * rot * scale,
                radius: c.radius * scale,
            };
            out.primal = p.primal.iter().map(|&c| f(c)).collect();
            out.dual = p.dual.iter().map(|c| c.map(f)).collect();
        }
    }
    out.residuals = super::residuals(net, &out);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, TessellationSpec};
    use crate::packing::{solve_double_packing, PackingOptions};
    use std::f64::consts::PI;

    #[test]
    fn radius_of_centred_disc() {
        assert!(
            (hyperbolic_radius(Complex64::new(0.0, 0.0), 0.5).unwrap() - 3f64.ln()).abs() < 1e-14
        );
        assert!(hyperbolic_radius(Complex64::new(0.3, 0.0), 1e-9).unwrap() < 1e-8);
        let a = hyperbolic_radius(Complex64::new(0.6, 0.0), 0.2).unwrap();
        let b = hyperbolic_radius(Complex64::from_polar(0.6, 2.0), 0.2).unwrap();
        assert!((a - b).abs() < 1e-12);
        assert!(hyperbolic_radius(Complex64::new(0.6, 0.0), 0.4).is_err());
    }

    /// Direct integral of the hyperbolic length element along a radius.
    #[test]
    fn radius_matches_metric_integral() {
        let (m, r) = (0.55, 0.3);
        let n = 200_000;
        let h = 2.0 * r / n as f64;
        let integral: f64 = (0..n)
            .map(|i| {
                let t = m - r + (i as f64 + 0.5) * h;
                2.0 / (1.0 - t * t) * h
            })
            .sum();
        let hr = hyperbolic_radius(Complex64::new(m, 0.0), r).unwrap();
        assert!((integral / 2.0 - hr).abs() < 1e-8);
    }

    /// Midpoint quadrature of `4 / (1 - |z|^2)^2` over the Euclidean disc.
    #[test]
    fn area_matches_quadrature() {
        let (c, r) = (Complex64::new(0.3, -0.2), 0.35);
        let n = 1500;
        let h = 2.0 * r / n as f64;
        let mut sum = 0.0;
        // polar grid around the centre
        let (nr, nt) = (2000, 2000);
        let dr = r / nr as f64;
        let dt = 2.0 * PI / nt as f64;
        for i in 0..nr {
            let rho = (i as f64 + 0.5) * dr;
            for j in 0..nt {
                let z = c + Complex64::from_polar(rho, (j as f64 + 0.5) * dt);
                sum += 4.0 / (1.0 - z.norm_sqr()).powi(2) * rho * dr * dt;
            }
        }
        let _ = (n, h);
        let hc = hyperbolic_circle(c, r).unwrap();
        assert!((sum / disc_area(hc.radius) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn diameter_examples() {
        let t = 0.4;
        let stats = vec![
            Some(HyperbolicStats {
                sigma: 0.0,
                radius: 0.1,
                area: 0.0,
                centre: Complex64::new(-t, 0.0),
            }),
            Some(HyperbolicStats {
                sigma: 0.0,
                radius: 0.1,
                area: 0.0,
                centre: Complex64::new(t, 0.0),
            }),
        ];
        assert_eq!(hyperbolic_diam(&stats, &[]).unwrap(), 0.0);
        assert_eq!(hyperbolic_diam(&stats, &[1]).unwrap(), 0.0);
        assert!((hyperbolic_diam(&stats, &[0, 1]).unwrap() - 2.0 * d0(t)).abs() < 1e-12);
    }

    #[test]
    fn normalization_properties() {
        let net = generators::tessellation_ball(&TessellationSpec::new(3, 7, 3)).unwrap();
        let p = solve_double_packing(&net, &PackingOptions::new(Model::UnitDisc)).unwrap();
        let x = 3;
        let y = net.neighbors(x).find(|&w| !p.horocycle[w]).unwrap();
        let q = mobius_normalize(&p, &net, x, y).unwrap();
        assert!(q.primal[x].centre.im.abs() < 1e-12 && q.primal[y].centre.im.abs() < 1e-12);
        assert!(q.primal[x].centre.re < 0.0 && q.primal[y].centre.re > 0.0);
        let tangency = q.primal[x].centre.re + q.primal[x].radius;
        assert!(tangency.abs() < 1e-12);
        assert!(q.residuals.tangency < 1e-7 && q.residuals.orthogonality < 1e-7);

        let (sp, sq) = (hyperbolic_stats(&p).unwrap(), hyperbolic_stats(&q).unwrap());
        for v in 0..net.vertex_count() {
            if let (Some(a), Some(b)) = (sp[v], sq[v]) {
                assert!((a.radius - b.radius).abs() < 1e-9);
                assert!((a.area - 4.0 * PI * (a.radius / 2.0).sinh().powi(2)).abs() < 1e-10);
            }
        }
        let set: Vec<usize> = (0..net.vertex_count())
            .filter(|&v| !p.horocycle[v])
            .collect();
        let (da, db) = (
            hyperbolic_diam(&sp, &set).unwrap(),
            hyperbolic_diam(&sq, &set).unwrap(),
        );
        assert!((da - db).abs() < 1e-9);

        let again = mobius_normalize(&q, &net, x, y).unwrap();
        for v in 0..net.vertex_count() {
            assert!((again.primal[v].centre - q.primal[v].centre).norm() < 1e-12);
            assert!((again.primal[v].radius - q.primal[v].radius).abs() < 1e-12);
        }
        assert!(mobius_normalize(&p, &net, 0, net.vertex_count() - 1).is_err());
    }

    #[test]
    fn area_is_monotone() {
        let net = generators::tessellation_ball(&TessellationSpec::new(3, 7, 3)).unwrap();
        let p = solve_double_packing(&net, &PackingOptions::new(Model::UnitDisc)).unwrap();
        let s = hyperbolic_stats(&p).unwrap();
        assert_eq!(hyperbolic_area(&s, &[]).unwrap(), 0.0);
        let a = hyperbolic_area(&s, &[0, 1]).unwrap();
        let b = hyperbolic_area(&s, &[0, 1, 2]).unwrap();
        assert!(a <= b);
    }
}
