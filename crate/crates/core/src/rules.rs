//! The two strategy-updating vector fields.
//!
//! Every agent runs the same control structure: with e_i the negated cost
//! gradient and gamma_i its running integral,
//!
//! ```text
//! x_i'     = (A_i - B_i K_i) x_i + B_i (kp e_i + ki gamma_i - dhat_i + d_i)
//! gamma_i' = e_i
//! dhat_i   = U_i (z_i + ko_i B_i^T x_i)
//! z_i'     = S_i z_i - ko_i B_i^T B_i (kp e_i + ki gamma_i)
//!            + (S_i ko_i B_i^T - ko_i B_i^T A_i + ko_i B_i^T B_i K_i) x_i
//! nu_i'    = S_i nu_i,   d_i = U_i nu_i
//! ```
//!
//! In the perfect-information rule e_i is the true gradient at the current
//! profile. In the imperfect-information rule e_i is evaluated with the
//! aggregate replaced by the agent's consensus estimate eta_i, and the
//! estimates follow the singularly perturbed dynamic average consensus
//! protocol
//!
//! ```text
//! delta eta'   = -eta - L eta - L omega + N y
//! delta omega' = L eta
//! ```
//!
//! The observer is simulated in its realizable z-form; the observation
//! error rho_i = nu_i - (z_i + ko_i B_i^T x_i) is a derived quantity that
//! provably obeys rho_i' = (S_i - ko_i B_i^T B_i U_i) rho_i along the flow.

use crate::game::GameModel;
use crate::graph::Graph;
use crate::linalg::Matrix;
use crate::plant::{augment, AgentPlant, AugmentedAgent, Exosystem, Gains, PlantError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("imperfect mode requires a connected graph")]
    DisconnectedGraph,
    #[error("imperfect mode requires delta > 0, got {0}")]
    NonPositiveDelta(f64),
    #[error("agent count mismatch: {0}")]
    AgentCountMismatch(String),
    #[error(transparent)]
    Plant(#[from] PlantError),
}

/// Information pattern of the strategy-updating rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Perfect,
    Imperfect,
}

/// Full network state. `eta`/`omega` are empty in perfect mode.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub x: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    pub z: Vec<Vec<f64>>,
    pub nu: Vec<Vec<f64>>,
    pub eta: Vec<f64>,
    pub omega: Vec<f64>,
}

impl NetworkState {
    pub fn zeros(net: &Network) -> Self {
        let n = net.agents.len();
        let consensus = if net.mode == Mode::Imperfect { n } else { 0 };
        NetworkState {
            x: net.agents.iter().map(|a| vec![0.0; a.plant.order()]).collect(),
            gamma: vec![0.0; n],
            z: net.agents.iter().map(|a| vec![0.0; a.exo.order()]).collect(),
            nu: net.agents.iter().map(|a| a.exo.nu0.clone()).collect(),
            eta: vec![0.0; consensus],
            omega: vec![0.0; consensus],
        }
    }

    pub fn flat_len(&self) -> usize {
        self.x.iter().map(Vec::len).sum::<usize>()
            + self.gamma.len()
            + self.z.iter().map(Vec::len).sum::<usize>()
            + self.nu.iter().map(Vec::len).sum::<usize>()
            + self.eta.len()
            + self.omega.len()
    }

    pub fn write_flat(&self, out: &mut [f64]) {
        let mut k = 0;
        for i in 0..self.x.len() {
            for v in &self.x[i] {
                out[k] = *v;
                k += 1;
            }
            out[k] = self.gamma[i];
            k += 1;
            for v in &self.z[i] {
                out[k] = *v;
                k += 1;
            }
            for v in &self.nu[i] {
                out[k] = *v;
                k += 1;
            }
        }
        for v in self.eta.iter().chain(&self.omega) {
            out[k] = *v;
            k += 1;
        }
        debug_assert_eq!(k, out.len());
    }

    pub fn read_flat(&mut self, flat: &[f64]) {
        let mut k = 0;
        for i in 0..self.x.len() {
            for v in self.x[i].iter_mut() {
                *v = flat[k];
                k += 1;
            }
            self.gamma[i] = flat[k];
            k += 1;
            for v in self.z[i].iter_mut() {
                *v = flat[k];
                k += 1;
            }
            for v in self.nu[i].iter_mut() {
                *v = flat[k];
                k += 1;
            }
        }
        for v in self.eta.iter_mut().chain(self.omega.iter_mut()) {
            *v = flat[k];
            k += 1;
        }
        debug_assert_eq!(k, flat.len());
    }
}

/// One agent with every matrix the vector field needs, precomputed.
#[derive(Debug, Clone)]
pub struct AgentRealization {
    pub plant: AgentPlant,
    pub gains: Gains,
    pub exo: Exosystem,
    pub aug: AugmentedAgent,
    /// S ko B^T - ko B^T A + ko B^T B K (q x n), the x-coupling of z'
    zx: Matrix,
    /// ko scaled by B^T B (length q)
    ko_btb: Vec<f64>,
    /// U ko (scalar): dhat = U z + (U ko) B^T x
    u_ko: f64,
}

impl AgentRealization {
    pub fn new(plant: AgentPlant, gains: Gains, exo: Exosystem) -> Result<Self, RulesError> {
        let aug = augment(&plant, &gains, &exo)?;
        let ko = Matrix::column(&gains.ko);
        let bt = plant.b.transpose();
        let btb: f64 = (0..plant.b.rows())
            .map(|i| plant.b[(i, 0)] * plant.b[(i, 0)])
            .sum();
        let zx = &(&(&exo.s * &ko) * &bt) - &(&(&ko * &bt) * &plant.a);
        let kbk = &ko.scale(btb) * &Matrix::row(&gains.k);
        let zx = &zx + &kbk;
        let u_ko: f64 = (0..exo.order()).map(|r| exo.u[(0, r)] * gains.ko[r]).sum();
        Ok(AgentRealization {
            plant,
            gains,
            exo,
            aug,
            zx,
            ko_btb: gains.ko.iter().map(|k| k * btb).collect(),
            u_ko,
        })
    }

    fn output(&self, x: &[f64]) -> f64 {
        (0..x.len()).map(|j| self.plant.c[(0, j)] * x[j]).sum()
    }
}

/// Resolved network: agents, game, topology and rule parameters.
#[derive(Debug, Clone)]
pub struct Network {
    pub agents: Vec<AgentRealization>,
    pub game: GameModel,
    pub graph: Graph,
    pub mode: Mode,
    pub delta: f64,
    pub observer_enabled: bool,
    laplacian: Matrix,
}

impl Network {
    pub fn new(
        agents: Vec<AgentRealization>,
        game: GameModel,
        graph: Graph,
        mode: Mode,
        delta: f64,
        observer_enabled: bool,
    ) -> Result<Self, RulesError> {
        if agents.len() != game.n() || agents.len() != graph.node_count() {
            return Err(RulesError::AgentCountMismatch(format!(
                "{} agents, {} players, {} graph nodes",
                agents.len(),
                game.n(),
                graph.node_count()
            )));
        }
        if mode == Mode::Imperfect {
            if !graph.is_connected() {
                return Err(RulesError::DisconnectedGraph);
            }
            if delta <= 0.0 {
                return Err(RulesError::NonPositiveDelta(delta));
            }
        }
        let laplacian = graph.laplacian();
        Ok(Network {
            agents,
            game,
            graph,
            mode,
            delta,
            observer_enabled,
            laplacian,
        })
    }

    pub fn n(&self) -> usize {
        self.agents.len()
    }

    pub fn state_len(&self) -> usize {
        let per_agent: usize = self
            .agents
            .iter()
            .map(|a| a.plant.order() + 1 + 2 * a.exo.order())
            .sum();
        per_agent
            + if self.mode == Mode::Imperfect {
                2 * self.n()
            } else {
                0
            }
    }

    /// Offset of agent i's block in the flat state vector.
    fn agent_offset(&self, i: usize) -> usize {
        self.agents[..i]
            .iter()
            .map(|a| a.plant.order() + 1 + 2 * a.exo.order())
            .sum()
    }

    fn consensus_offset(&self) -> usize {
        self.agent_offset(self.agents.len())
    }

    /// Strategy vector y from a flat state.
    pub fn output_flat(&self, flat: &[f64], y: &mut [f64]) {
        for (i, agent) in self.agents.iter().enumerate() {
            let o = self.agent_offset(i);
            y[i] = agent.output(&flat[o..o + agent.plant.order()]);
        }
    }

    /// Vector field on the flat state. In perfect mode the gradient sees
    /// the true aggregate; in imperfect mode it sees eta_i.
    pub fn deriv_flat(&self, _t: f64, flat: &[f64], out: &mut [f64]) {
        let n = self.n();
        let mut y = vec![0.0; n];
        self.output_flat(flat, &mut y);
        let sigma: f64 = y.iter().sum();
        let cons = self.consensus_offset();
        for (i, agent) in self.agents.iter().enumerate() {
            let o = self.agent_offset(i);
            let nx = agent.plant.order();
            let q = agent.exo.order();
            let x = &flat[o..o + nx];
            let gamma = flat[o + nx];
            let z = &flat[o + nx + 1..o + nx + 1 + q];
            let nu = &flat[o + nx + 1 + q..o + nx + 1 + 2 * q];

            let aggregate = match self.mode {
                Mode::Perfect => sigma,
                Mode::Imperfect => flat[cons + i],
            };
            let e = -self
                .game
                .partial_map(i + 1, y[i], aggregate)
                .expect("player index is in range");

            let d: f64 = (0..q).map(|r| agent.exo.u[(0, r)] * nu[r]).sum();
            let btx: f64 = (0..nx).map(|j| agent.plant.b[(j, 0)] * x[j]).sum();
            let dhat = if self.observer_enabled {
                let uz: f64 = (0..q).map(|r| agent.exo.u[(0, r)] * z[r]).sum();
                uz + agent.u_ko * btx
            } else {
                0.0
            };
            let pi_drive = agent.gains.kp * e + agent.gains.ki * gamma;
            let u_total = pi_drive - dhat + d;
            for r in 0..nx {
                let mut v = agent.plant.b[(r, 0)] * u_total;
                for j in 0..nx {
                    v += agent.aug.h[(r, j)] * x[j];
                }
                out[o + r] = v;
            }
            out[o + nx] = e;
            for r in 0..q {
                let mut v = -agent.ko_btb[r] * pi_drive;
                for j in 0..q {
                    v += agent.exo.s[(r, j)] * z[j];
                }
                for j in 0..nx {
                    v += agent.zx[(r, j)] * x[j];
                }
                out[o + nx + 1 + r] = v;
            }
            for r in 0..q {
                let mut v = 0.0;
                for j in 0..q {
                    v += agent.exo.s[(r, j)] * nu[j];
                }
                out[o + nx + 1 + q + r] = v;
            }
        }
        if self.mode == Mode::Imperfect {
            let eta = &flat[cons..cons + n];
            let omega = &flat[cons + n..cons + 2 * n];
            let inv_delta = 1.0 / self.delta;
            for i in 0..n {
                let mut l_eta = 0.0;
                let mut l_omega = 0.0;
                for j in 0..n {
                    l_eta += self.laplacian[(i, j)] * eta[j];
                    l_omega += self.laplacian[(i, j)] * omega[j];
                }
                out[cons + i] = (-eta[i] - l_eta - l_omega + n as f64 * y[i]) * inv_delta;
                out[cons + n + i] = l_eta * inv_delta;
            }
        }
    }

    /// Observation errors rho_i = nu_i - (z_i + ko_i B_i^T x_i).
    pub fn observation_error(&self, state: &NetworkState) -> Vec<Vec<f64>> {
        self.agents
            .iter()
            .enumerate()
            .map(|(i, agent)| {
                let btx: f64 = (0..agent.plant.order())
                    .map(|j| agent.plant.b[(j, 0)] * state.x[i][j])
                    .sum();
                (0..agent.exo.order())
                    .map(|r| state.nu[i][r] - state.z[i][r] - agent.gains.ko[r] * btx)
                    .collect()
            })
            .collect()
    }

    /// State with the plant and integrator at rest on a given strategy
    /// profile and the observation error at zero. The rest point solves
    ///
    /// ```text
    /// [ H   B ki ] [x*]   [0 ]
    /// [ C    0   ] [g*] = [y*]
    /// ```
    ///
    /// per agent; z is set to nu0 - ko B^T x* so that rho(0) = 0.
    pub fn equilibrium_state(&self, y_star: &[f64]) -> Result<NetworkState, RulesError> {
        let mut state = NetworkState::zeros(self);
        let sigma: f64 = y_star.iter().sum();
        for (i, agent) in self.agents.iter().enumerate() {
            let nx = agent.plant.order();
            let mut sys = Matrix::zeros(nx + 1, nx + 1);
            sys.set_block(0, 0, &agent.aug.h);
            sys.set_block(0, nx, &agent.plant.b.scale(agent.gains.ki));
            sys.set_block(nx, 0, &agent.plant.c);
            let mut rhs = vec![0.0; nx + 1];
            rhs[nx] = y_star[i];
            let sol = sys
                .solve(&rhs)
                .map_err(|e| RulesError::Plant(PlantError::Linalg(e)))?;
            state.x[i] = sol[..nx].to_vec();
            state.gamma[i] = sol[nx];
            let btx: f64 = (0..nx)
                .map(|j| agent.plant.b[(j, 0)] * state.x[i][j])
                .sum();
            for r in 0..agent.exo.order() {
                state.z[i][r] = agent.exo.nu0[r] - agent.gains.ko[r] * btx;
            }
        }
        if self.mode == Mode::Imperfect {
            // quasi-steady consensus state: eta = sigma 1, L omega = N y - sigma 1
            for i in 0..self.n() {
                state.eta[i] = sigma;
            }
            let n = self.n();
            let mut sys = Matrix::zeros(n + 1, n);
            for i in 0..n {
                for j in 0..n {
                    sys[(i, j)] = self.laplacian[(i, j)];
                }
                sys[(n, i)] = 1.0;
            }
            // least-squares via normal equations with the mean pinned to 0
            let mut rhs = vec![0.0; n + 1];
            for i in 0..n {
                rhs[i] = n as f64 * y_star[i] - sigma;
            }
            let sys_t = sys.transpose();
            let normal = &sys_t * &sys;
            let ntb = sys_t.mul_vec(&rhs);
            let omega = normal
                .solve(&ntb)
                .map_err(|e| RulesError::Plant(PlantError::Linalg(e)))?;
            state.omega = omega;
        }
        Ok(state)
    }
}

/// Strategy vector y with y_i = C_i x_i.
pub fn output(state: &NetworkState, net: &Network) -> Vec<f64> {
    net.agents
        .iter()
        .zip(&state.x)
        .map(|(agent, x)| agent.output(x))
        .collect()
}

/// Perfect-information vector field at (state, t).
pub fn deriv_perfect(state: &NetworkState, net: &Network, t: f64) -> NetworkState {
    assert_eq!(net.mode, Mode::Perfect, "network not in perfect mode");
    deriv(state, net, t)
}

/// Imperfect-information vector field at (state, t).
pub fn deriv_imperfect(state: &NetworkState, net: &Network, t: f64) -> NetworkState {
    assert_eq!(net.mode, Mode::Imperfect, "network not in imperfect mode");
    deriv(state, net, t)
}

fn deriv(state: &NetworkState, net: &Network, t: f64) -> NetworkState {
    let len = state.flat_len();
    let mut flat = vec![0.0; len];
    state.write_flat(&mut flat);
    let mut out_flat = vec![0.0; len];
    net.deriv_flat(t, &flat, &mut out_flat);
    let mut out = state.clone();
    out.read_flat(&out_flat);
    out
}
