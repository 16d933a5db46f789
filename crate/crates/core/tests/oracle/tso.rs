//! Total store order as a machine with one FIFO store buffer per thread.
//! Reads forward from the newest buffered store to their location, a fence
//! waits until its buffer is empty, and buffers drain at any time.

use std::collections::{BTreeMap, HashSet, VecDeque};

use litmusforge::lisa::{Instruction, LitmusTest};

use super::{eval, initial_memory, outcome, Outcomes, Thread};

type Buffer = VecDeque<(String, i64)>;
type State = (Vec<Thread>, Vec<Buffer>, BTreeMap<String, i64>);

pub fn outcomes(test: &LitmusTest, bound: u32) -> Outcomes {
    let n = test.processes.len();
    let mut threads = vec![Thread::new(); n];
    for (t, p) in threads.iter_mut().zip(&test.processes) {
        if !t.settle(p, bound) {
            return Outcomes::new();
        }
    }
    let mut out = Outcomes::new();
    let mut seen = HashSet::new();
    let mut stack: Vec<State> = vec![(threads, vec![Buffer::new(); n], initial_memory(test))];
    while let Some(state) = stack.pop() {
        if !seen.insert(state.clone()) {
            continue;
        }
        let (threads, buffers, memory) = &state;
        let mut done = true;
        for i in 0..n {
            if !buffers[i].is_empty() {
                done = false;
                let (ts, mut bs, mut mem) = state.clone();
                let (l, v) = bs[i].pop_front().unwrap();
                mem.insert(l, v);
                stack.push((ts, bs, mem));
            }
            let p = &test.processes[i];
            let Some(instr) = p.code.get(threads[i].pc) else {
                continue;
            };
            done = false;
            let (mut ts, mut bs, mem) = state.clone();
            let t = &mut ts[i];
            match instr {
                Instruction::Write { location, value, .. } => {
                    bs[i].push_back((location.clone(), eval(value, &t.regs)));
                }
                Instruction::Read { register, location, .. } => {
                    let v = bs[i]
                        .iter()
                        .rev()
                        .find(|(l, _)| l == location)
                        .map(|(_, v)| *v)
                        .unwrap_or(mem[location]);
                    t.regs.insert(register.clone(), v);
                }
                Instruction::Fence { .. } => {
                    if !bs[i].is_empty() {
                        continue;
                    }
                }
                _ => unreachable!("settled threads stop at memory accesses"),
            }
            t.pc += 1;
            if t.settle(p, bound) {
                stack.push((ts, bs, mem));
            }
        }
        if done {
            out.insert(outcome(test, threads, memory));
        }
    }
    out
}
