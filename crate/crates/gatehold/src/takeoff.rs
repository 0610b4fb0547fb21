//! Stochastic runway service process.
//!
//! Each minute with a non-empty runway queue, a rate is drawn from the
//! three-point model and added to a fractional clearance accumulator; the
//! integer part, capped by the queue length, is released as take-offs.
//! While the queue is empty the accumulator is frozen and no rate is drawn,
//! so idle periods bank no clearance credit.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::calibration::TakeoffParams;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub struct RunwayProcess<S> {
    params: TakeoffParams<S>,
    carry: S,
    rng: ChaCha8Rng,
}

impl<S: Scalar> RunwayProcess<S> {
    pub fn new(params: TakeoffParams<S>, rng: ChaCha8Rng) -> Self {
        Self {
            params,
            carry: S::zero(),
            rng,
        }
    }

    pub fn params(&self) -> &TakeoffParams<S> {
        &self.params
    }

    /// Fractional clearance accumulated so far.
    pub fn carry(&self) -> S {
        self.carry
    }

    /// Overrides the accumulator, e.g. to resume a saved state.
    pub fn set_carry(&mut self, carry: S) {
        assert!(carry >= S::zero(), "carry must be non-negative");
        self.carry = carry;
    }

    /// Advances one minute: draws a rate (only if the queue is non-empty)
    /// and returns the number of take-offs cleared.
    pub fn step(&mut self, queue_len: usize) -> usize {
        if queue_len == 0 {
            return 0;
        }
        let rate = self.draw_rate();
        self.step_with_rate(rate, queue_len)
    }

    /// Advances one minute with an externally chosen rate.
    pub fn step_with_rate(&mut self, rate: S, queue_len: usize) -> usize {
        if queue_len == 0 {
            return 0;
        }
        self.carry = self.carry + rate;
        let whole = self.carry.floor().to_usize().unwrap_or(0);
        let cleared = whole.min(queue_len);
        self.carry = self.carry - S::from_usize(cleared).unwrap();
        cleared
    }

    fn draw_rate(&mut self) -> S {
        let u: f64 = self.rng.gen();
        let p1 = self.params.p1.to_f64().unwrap();
        let p2 = self.params.p2.to_f64().unwrap();
        if u < p1 {
            self.params.c1
        } else if u < p1 + p2 {
            self.params.c2
        } else {
            self.params.c3
        }
    }
}
