//! Sequential consistency as an interleaving machine over one shared memory.

use std::collections::{BTreeMap, HashSet};

use litmusforge::lisa::{Instruction, LitmusTest};

use super::{initial_memory, outcome, eval, Outcomes, Thread};

type State = (Vec<Thread>, BTreeMap<String, i64>);

/// Final outcomes of every interleaving in which no backward branch is
/// taken more than `bound` times.
pub fn outcomes(test: &LitmusTest, bound: u32) -> Outcomes {
    let mut threads = vec![Thread::new(); test.processes.len()];
    for (t, p) in threads.iter_mut().zip(&test.processes) {
        if !t.settle(p, bound) {
            return Outcomes::new();
        }
    }
    let mut out = Outcomes::new();
    let mut seen = HashSet::new();
    let mut stack: Vec<State> = vec![(threads, initial_memory(test))];
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let (threads, memory) = &state;
        let mut done = true;
        for (i, p) in test.processes.iter().enumerate() {
            let Some(instr) = p.code.get(threads[i].pc) else {
                continue;
            };
            done = false;
            let (mut ts, mut mem) = state.clone();
            let t = &mut ts[i];
            match instr {
                Instruction::Write { location, value, .. } => {
                    mem.insert(location.clone(), eval(value, &t.regs));
                }
                Instruction::Read { register, location, .. } => {
                    t.regs.insert(register.clone(), mem[location]);
                }
                Instruction::Fence { .. } => {}
                _ => unreachable!("settled threads stop at memory accesses"),
            }
            t.pc += 1;
            if t.settle(p, bound) {
                stack.push((ts, mem));
            }
        }
        if done {
            out.insert(outcome(test, threads, memory));
        }
    }
    out
}
