use winkler::charfun::{
    eval_f, eval_f_prime, eval_ghat, eval_ghat_prime, eval_gl, eval_gl_prime, eval_psi,
    eval_psi_prime, eval_q, eval_q_prime, ghat_inverse_closed, invert_gl, BeamConfig,
};
use winkler::spectral::eval_kernel;
use winkler::{Error, Result};

use crate::output::format_sig15;
use crate::{EvalArgs, EXIT_OK};

use super::beam_config;

/// Resolve the dimensionless length: explicit flag first, config otherwise.
fn resolve_big_l(args: &EvalArgs) -> Result<f64> {
    match args.big_l {
        Some(l) if l > 0.0 && l.is_finite() => Ok(l),
        Some(l) => Err(Error::Domain(format!("L must be finite and > 0 (got {l})"))),
        None => Ok(beam_config(&args.config)?.big_l),
    }
}

/// Config for kernel evaluation; an explicit --alpha overrides the derived
/// one by adjusting E so that (k/(EI))^(1/4) comes out at the requested value.
fn resolve_kernel_config(args: &EvalArgs) -> Result<BeamConfig<f64>> {
    match args.alpha {
        Some(alpha) if alpha > 0.0 && alpha.is_finite() => {
            BeamConfig::new(args.config.k / alpha.powi(4), 1.0, args.config.k, args.config.l)
        }
        Some(alpha) => Err(Error::Domain(format!("alpha must be finite and > 0 (got {alpha})"))),
        None => beam_config(&args.config),
    }
}

pub fn run(args: &EvalArgs) -> Result<u8> {
    let x = args.x;
    match args.function.as_str() {
        "q" => println!("{}", format_sig15(eval_q(x)?)),
        "q'" => println!("{}", format_sig15(eval_q_prime(x)?)),
        "f" => println!("{}", format_sig15(eval_f(x)?)),
        "f'" => println!("{}", format_sig15(eval_f_prime(x)?)),
        "ghat" => println!("{}", format_sig15(eval_ghat(x)?.value)),
        "ghat'" => println!("{}", format_sig15(eval_ghat_prime(x)?)),
        "gL" => println!("{}", format_sig15(eval_gl(x, resolve_big_l(args)?)?)),
        "gL'" => println!("{}", format_sig15(eval_gl_prime(x, resolve_big_l(args)?)?)),
        "gL_inv" => {
            if !(args.tol > 0.0) {
                return Err(Error::Domain(format!("tol must be > 0 (got {})", args.tol)));
            }
            println!("{}", format_sig15(invert_gl(x, resolve_big_l(args)?, args.tol)?));
        }
        "psi" => {
            let psi = eval_psi(x, resolve_big_l(args)?)?;
            println!("{}", format_sig15(psi.value));
            if psi.saturated {
                println!("ln_psi={}", format_sig15(psi.ln_value));
            }
        }
        "psi'" => println!("{}", format_sig15(eval_psi_prime(x, resolve_big_l(args)?)?)),
        "K" => println!("{}", format_sig15(eval_kernel(x, &resolve_kernel_config(args)?)?)),
        "ghat_inv_closed" => println!("{}", format_sig15(ghat_inverse_closed(x)?)),
        other => {
            return Err(Error::Domain(format!(
                "unknown function '{other}'; expected one of \
                 q q' f f' ghat ghat' gL gL' gL_inv psi psi' K ghat_inv_closed"
            )))
        }
    }
    Ok(EXIT_OK)
}
