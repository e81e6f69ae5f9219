//! Field interchange format: header `x[,y],t,value`, one row per
//! `(node, time)` sample, numbers written like C's `%.17g`.

use std::io::{BufRead, Write};

use super::{Grid, ScalarField, TimeGrid};
use crate::error::{Error, Result};

/// Formats `v` the way `printf("%.17g", v)` does.
pub fn format_g17(v: f64) -> String {
    const P: i32 = 17;
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() {
            "-0".into()
        } else {
            "0".into()
        };
    }
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..P).contains(&exp) {
        let mantissa = trim_fraction(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let fixed = format!("{:.*}", (P - 1 - exp) as usize, v);
        trim_fraction(&fixed).to_string()
    }
}

fn trim_fraction(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_field_csv<W: Write>(field: &ScalarField, mut out: W) -> Result<()> {
    let grid = field.grid();
    let tg = field.time_grid();
    if grid.dim() == 2 {
        writeln!(out, "x,y,t,value")?;
    } else {
        writeln!(out, "x,t,value")?;
    }
    for j in 0..tg.n_times() {
        let t = format_g17(tg.time(j));
        for (node, v) in field.slice(j).iter().enumerate() {
            let p = grid.node_position(node);
            if grid.dim() == 2 {
                writeln!(
                    out,
                    "{},{},{},{}",
                    format_g17(p[0]),
                    format_g17(p[1]),
                    t,
                    format_g17(*v)
                )?;
            } else {
                writeln!(out, "{},{},{}", format_g17(p[0]), t, format_g17(*v))?;
            }
        }
    }
    Ok(())
}

/// Reads a field written by [`write_field_csv`] (any row order) and
/// reconstructs its uniform grid.
pub fn read_field_csv<R: BufRead>(input: R, name: &str) -> Result<ScalarField> {
    let mut lines = input.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => {
            return Err(Error::Csv {
                line: 1,
                message: "empty input".into(),
            })
        }
    };
    let columns: Vec<&str> = header.trim().split(',').map(str::trim).collect();
    let dim = match columns.as_slice() {
        ["x", "t", "value"] => 1,
        ["x", "y", "t", "value"] => 2,
        _ => {
            return Err(Error::Csv {
                line: 1,
                message: format!("unexpected header {header:?}"),
            })
        }
    };

    let mut rows: Vec<[f64; 4]> = Vec::new();
    for (k, line) in lines.enumerate() {
        let line_no = k + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != dim + 2 {
            return Err(Error::Csv {
                line: line_no,
                message: format!("expected {} columns, found {}", dim + 2, fields.len()),
            });
        }
        let mut row = [0.0; 4];
        for (c, text) in fields.iter().enumerate() {
            let v: f64 = text.trim().parse().map_err(|_| Error::Csv {
                line: line_no,
                message: format!("cannot parse {:?} as a number", text.trim()),
            })?;
            row[c] = v;
        }
        // normalize to [x, y, t, value]
        if dim == 1 {
            row = [row[0], 0.0, row[1], row[2]];
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Csv {
            line: 2,
            message: "no samples".into(),
        });
    }

    let axis_values = |c: usize| {
        let mut v: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let xs = axis_values(0);
    let ys = axis_values(1);
    let ts = axis_values(2);
    let uniform = |v: &[f64], what: &str| -> Result<(f64, f64, usize)> {
        if v.len() < 2 {
            return Err(Error::Csv {
                line: 2,
                message: format!("need at least two distinct {what} values"),
            });
        }
        let n = v.len() - 1;
        let step = (v[n] - v[0]) / n as f64;
        for (i, &a) in v.iter().enumerate() {
            if (a - (v[0] + i as f64 * step)).abs() > 1e-6 * step {
                return Err(Error::Csv {
                    line: 2,
                    message: format!("{what} values are not uniformly spaced"),
                });
            }
        }
        Ok((v[0], v[n] - v[0], n))
    };
    let (x0, ex, nx) = uniform(&xs, "x")?;
    let grid = if dim == 2 {
        let (y0, ey, ny) = uniform(&ys, "y")?;
        Grid::new_2d([x0, y0], [ex, ey], [nx, ny])?
    } else {
        Grid::new_1d(x0, ex, nx)?
    };
    let (t0, et, nt) = if ts.len() == 1 {
        return Err(Error::Csv {
            line: 2,
            message: "need at least two time levels".into(),
        });
    } else {
        uniform(&ts, "t")?
    };
    let time_grid = TimeGrid::new(t0, et / nt as f64, nt)?;

    let expected = grid.node_count() * time_grid.n_times();
    if rows.len() != expected {
        return Err(Error::Csv {
            line: rows.len() + 1,
            message: format!("expected {expected} samples, found {}", rows.len()),
        });
    }
    let mut values = vec![f64::NAN; expected];
    let nodes = grid.node_count();
    for (k, r) in rows.iter().enumerate() {
        let i = grid.nearest_index(0, r[0]);
        let jy = if dim == 2 {
            grid.nearest_index(1, r[1])
        } else {
            Some(0)
        };
        let jt = time_grid.nearest_index(r[2]);
        match (i, jy, jt) {
            (Some(i), Some(jy), Some(jt)) => {
                let slot = jt * nodes + grid.node_id([i, jy]);
                if !values[slot].is_nan() {
                    return Err(Error::Csv {
                        line: k + 2,
                        message: "duplicate sample".into(),
                    });
                }
                values[slot] = r[3];
            }
            _ => {
                return Err(Error::Csv {
                    line: k + 2,
                    message: "sample off the grid".into(),
                })
            }
        }
    }
    ScalarField::from_values(grid, time_grid, values, name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn g17_matches_printf() {
        assert_eq!(format_g17(0.1), "0.10000000000000001");
        assert_eq!(format_g17(1.0), "1");
        assert_eq!(format_g17(-2.5), "-2.5");
        assert_eq!(format_g17(1e-5), "1.0000000000000001e-05");
        assert_eq!(format_g17(1e20), "1e+20");
        assert_eq!(format_g17(123456.0), "123456");
        assert_eq!(format_g17(0.0001), "0.0001");
        assert_eq!(format_g17(0.0), "0");
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let text = "x,t,value\n0,0,1\n1,0,oops\n";
        match read_field_csv(text.as_bytes(), "u") {
            Err(Error::Csv { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
        assert!(read_field_csv("a,b\n".as_bytes(), "u").is_err());
    }

    proptest! {
        #[test]
        fn csv_round_trip_preserves_samples(n in 2usize..6, m in 1usize..4, seed in 0u64..1000, two_d in any::<bool>()) {
            let g = if two_d {
                Grid::new_2d([-0.3, 0.1], [1.7, 0.9], [n, n + 1]).unwrap()
            } else {
                Grid::new_1d(-0.3, 1.7, n).unwrap()
            };
            let tg = TimeGrid::new(0.25, 0.1, m).unwrap();
            let s = seed as f64;
            let f = ScalarField::from_fn(g, tg, "u", |x, t| (s * x[0] + x[1] * 3.1 - t).sin() * 1e-3 + s);
            let mut buf = Vec::new();
            write_field_csv(&f, &mut buf).unwrap();
            let back = read_field_csv(buf.as_slice(), "u").unwrap();
            prop_assert!(back.same_layout(&f));
            prop_assert_eq!(back.values(), f.values());
        }
    }
}
