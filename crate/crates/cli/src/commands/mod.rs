pub mod deflect;
pub mod eval;
pub mod scan;
pub mod spectrum;

use winkler::charfun::BeamConfig;
use winkler::Result;

use crate::ConfigArgs;

pub fn beam_config(args: &ConfigArgs) -> Result<BeamConfig<f64>> {
    BeamConfig::new(args.e, args.i, args.k, args.l)
}
