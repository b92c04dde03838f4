//! Named builtin examples.

use confsym::fixtures;
use confsym::{Poly, Rational};

use crate::document::Document;
use crate::error::{CliError, CliResult};

/// `(name pattern, description)` for `examples list`.
pub const EXAMPLES: [(&str, &str); 7] = [
    ("hb2", "rank 2, a_L a = (D^2 + L*D + L^2) b, with its Frobenius form"),
    ("podd(p)", "rank 2, a_L a = p(L + D) b, with Δ(a) = a⊗b, Δ(b) = b⊗b; p an expression in L"),
    ("rank1(k)", "rank 1, a_L a = k a; k rational"),
    ("dend-succ", "rank 1 dendriform, a >_L a = a, a <_L a = 0"),
    ("dend-prec", "rank 1 dendriform, a <_L a = a, a >_L a = 0"),
    ("null(n)", "rank n, all products zero"),
    ("cur-dual2", "Cur(Q[x]/(x^2)) on u = 1, v = x"),
];

/// Resolves a name such as `podd(L^3)` or `rank1(2/3)` to its documents.
pub fn lookup(name: &str) -> CliResult<Vec<Document>> {
    let name = name.trim();
    let (head, arg) = match name.split_once('(') {
        Some((head, rest)) => {
            let arg = rest
                .strip_suffix(')')
                .ok_or_else(|| CliError::input(format!("example {name}"), "missing closing parenthesis"))?;
            (head.trim(), Some(arg.trim()))
        }
        None => (name, None),
    };
    let ctx = format!("example {name}");
    let need = || arg.ok_or_else(|| CliError::input(&ctx, format!("{head} takes an argument")));
    let none = || match arg {
        None => Ok(()),
        Some(_) => Err(CliError::input(&ctx, format!("{head} takes no argument"))),
    };
    match head {
        "hb2" => {
            none()?;
            Ok(vec![Document::Algebra(fixtures::hb2()), Document::Form(fixtures::hb2_form())])
        }
        "podd" => {
            let src = need()?;
            let p = Poly::parse(src).map_err(|e| CliError::input(&ctx, e.to_string()))?;
            let (a, d) = fixtures::podd(&p).map_err(|e| CliError::input(&ctx, e.to_string()))?;
            Ok(vec![Document::Algebra(a), Document::Coproduct(d)])
        }
        "rank1" => {
            let k = rational(&ctx, need()?)?;
            Ok(vec![Document::Algebra(fixtures::rank1(k))])
        }
        "dend-succ" => {
            none()?;
            Ok(vec![Document::Dendriform(fixtures::dend_succ())])
        }
        "dend-prec" => {
            none()?;
            Ok(vec![Document::Dendriform(fixtures::dend_prec())])
        }
        "null" => {
            let n: usize = need()?
                .parse()
                .map_err(|_| CliError::input(&ctx, "expected a non-negative integer rank"))?;
            Ok(vec![Document::Algebra(fixtures::null(n))])
        }
        "cur-dual2" => {
            none()?;
            Ok(vec![Document::Algebra(fixtures::cur_dual2())])
        }
        _ => Err(CliError::input(&ctx, "unknown example; see `examples list`")),
    }
}

fn rational(ctx: &str, src: &str) -> CliResult<Rational> {
    Poly::parse(src)
        .ok()
        .filter(|p| p.is_constant())
        .and_then(|p| p.constant_value())
        .ok_or_else(|| CliError::input(ctx, format!("expected a rational constant, found \"{src}\"")))
}
