//! Irreducibility and period of finite directed graphs.

use std::collections::VecDeque;

use crate::error::{Error, Result};

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 { a } else { gcd(b, a % b) }
}

/// Checks that the graph on `0..n` given by `succ` is strongly connected and
/// aperiodic.
pub(crate) fn check_primitive<F>(n: usize, succ: F) -> Result<()>
where
    F: Fn(usize, &mut Vec<usize>),
{
    if n == 0 {
        return Err(Error::NotPrimitive("empty state space".into()));
    }
    let mut adj: Vec<Vec<usize>> = Vec::with_capacity(n);
    let mut buf = Vec::new();
    for u in 0..n {
        buf.clear();
        succ(u, &mut buf);
        adj.push(buf.clone());
    }
    let level = bfs(n, |u| adj[u].iter().copied());
    if let Some(u) = level.iter().position(Option::is_none) {
        return Err(Error::NotPrimitive(format!("state {u} is unreachable from state 0")));
    }
    let mut radj = vec![Vec::new(); n];
    for (u, vs) in adj.iter().enumerate() {
        for &v in vs {
            radj[v].push(u);
        }
    }
    if let Some(u) = bfs(n, |u| radj[u].iter().copied()).iter().position(Option::is_none) {
        return Err(Error::NotPrimitive(format!("state 0 is unreachable from state {u}")));
    }
    let mut period = 0;
    for (u, vs) in adj.iter().enumerate() {
        let lu = level[u].unwrap();
        for &v in vs {
            let lv = level[v].unwrap();
            period = gcd(period, (lu + 1).abs_diff(lv));
        }
    }
    if period != 1 {
        return Err(Error::NotPrimitive(format!("chain is periodic with period {period}")));
    }
    Ok(())
}

fn bfs<I, F>(n: usize, next: F) -> Vec<Option<usize>>
where
    I: Iterator<Item = usize>,
    F: Fn(usize) -> I,
{
    let mut level = vec![None; n];
    level[0] = Some(0);
    let mut queue = VecDeque::from([0]);
    while let Some(u) = queue.pop_front() {
        let l = level[u].unwrap();
        for v in next(u) {
            if level[v].is_none() {
                level[v] = Some(l + 1);
                queue.push_back(v);
            }
        }
    }
    level
}
