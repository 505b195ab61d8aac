use serde::Serialize;

use crate::addressing::TreeConfig;

/// Switch at `level` (1 = leaf-adjacent R1, `levels` = root), `position`
/// counted left to right among the switches of that level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SwitchId {
    pub level: usize,
    pub position: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeId {
    Core(usize),
    Switch(SwitchId),
}

/// The link between a level-`level` switch and its child at height
/// `level - 1` with position `child` (a core when `level == 1`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct LinkId {
    pub level: usize,
    pub child: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Switch {
    pub id: SwitchId,
    /// `None` at the root.
    pub up: Option<SwitchId>,
    /// Down port `d` leads to child digit `d`.
    pub down: Vec<NodeId>,
}

/// k-ary tree of switches with the cores as leaves.
#[derive(Debug, Clone)]
pub struct Topology {
    cfg: TreeConfig,
    /// Root first, then level by level downwards.
    switches: Vec<Switch>,
}

pub fn build_tree(cfg: &TreeConfig) -> Topology {
    Topology::new(*cfg)
}

impl Topology {
    pub fn new(cfg: TreeConfig) -> Self {
        let k = cfg.fan_out();
        let levels = cfg.levels();
        let mut switches = Vec::new();
        for level in (1..=levels).rev() {
            for position in 0..k.pow((levels - level) as u32) {
                let up = (level < levels).then(|| SwitchId { level: level + 1, position: position / k });
                let down = (0..k)
                    .map(|d| {
                        let child = position * k + d;
                        if level == 1 {
                            NodeId::Core(child)
                        } else {
                            NodeId::Switch(SwitchId { level: level - 1, position: child })
                        }
                    })
                    .collect();
                switches.push(Switch { id: SwitchId { level, position }, up, down });
            }
        }
        Self { cfg, switches }
    }

    pub fn cfg(&self) -> &TreeConfig {
        &self.cfg
    }

    pub fn switch_count(&self) -> usize {
        self.switches.len()
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn switches_at(&self, level: usize) -> usize {
        if level == 0 || level > self.cfg.levels() {
            0
        } else {
            self.cfg.fan_out().pow((self.cfg.levels() - level) as u32)
        }
    }

    pub fn root(&self) -> SwitchId {
        SwitchId { level: self.cfg.levels(), position: 0 }
    }

    /// Index into [`Topology::switches`].
    pub fn flat_index(&self, id: SwitchId) -> Option<usize> {
        let levels = self.cfg.levels();
        if id.level == 0 || id.level > levels || id.position >= self.switches_at(id.level) {
            return None;
        }
        let above: usize = (id.level + 1..=levels).map(|l| self.switches_at(l)).sum();
        Some(above + id.position)
    }

    pub fn switch(&self, id: SwitchId) -> Option<&Switch> {
        self.flat_index(id).map(|i| &self.switches[i])
    }

    /// The switch at `level` above `core`.
    pub fn ancestor(&self, core: usize, level: usize) -> SwitchId {
        SwitchId { level, position: core / self.cfg.subtree_size(level) }
    }

    /// Links from `core` up to the switch at `level`, bottom first.
    pub fn upward_links(&self, core: usize, level: usize) -> impl Iterator<Item = LinkId> + '_ {
        (1..=level).map(move |l| LinkId { level: l, child: core / self.cfg.subtree_size(l - 1) })
    }

    /// Links from the switch at `level` above `core` down to `core`, top first.
    pub fn downward_links(&self, core: usize, level: usize) -> impl Iterator<Item = LinkId> + '_ {
        (1..=level).rev().map(move |l| LinkId { level: l, child: core / self.cfg.subtree_size(l - 1) })
    }

    pub fn links_at(&self, level: usize) -> usize {
        self.switches_at(level) * self.cfg.fan_out()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(k: u32, l: u32) -> Topology {
        build_tree(&TreeConfig::new(k, l).unwrap())
    }

    #[test]
    fn switch_counts() {
        let t = topo(4, 2);
        assert_eq!(t.switch_count(), 5);
        assert_eq!(t.switches_at(1), 4);
        assert_eq!(t.switches_at(2), 1);
        assert_eq!(topo(2, 1).switch_count(), 1);
        assert_eq!(topo(4, 3).switch_count(), 21);
        assert_eq!(topo(4, 3).cfg().core_count(), 64);
        for (k, l) in [(2, 4), (3, 3), (5, 2)] {
            let t = topo(k, l);
            let n = t.cfg().core_count();
            assert_eq!(t.switch_count(), (n - 1) / (k as usize - 1));
        }
    }

    #[test]
    fn root_has_no_up_port_and_ports_follow_digits() {
        let t = topo(4, 2);
        let root = t.switch(t.root()).unwrap();
        assert!(root.up.is_none());
        assert_eq!(root.down[2], NodeId::Switch(SwitchId { level: 1, position: 2 }));
        let r1 = t.switch(SwitchId { level: 1, position: 2 }).unwrap();
        assert_eq!(r1.up, Some(t.root()));
        assert_eq!(r1.down[3], NodeId::Core(11));
        assert!(t.switch(SwitchId { level: 1, position: 4 }).is_none());
    }

    #[test]
    fn every_core_has_one_path_of_length_l() {
        for (k, l) in [(4, 2), (2, 3), (3, 3)] {
            let t = topo(k, l);
            let n = t.cfg().core_count();
            let mut seen = vec![0usize; n];
            // walk down from the root through every port
            let mut stack = vec![(t.root(), 0usize)];
            while let Some((id, depth)) = stack.pop() {
                for node in &t.switch(id).unwrap().down {
                    match *node {
                        NodeId::Core(c) => {
                            assert_eq!(depth + 1, l as usize);
                            seen[c] += 1;
                        }
                        NodeId::Switch(s) => stack.push((s, depth + 1)),
                    }
                }
            }
            assert!(seen.iter().all(|&s| s == 1));
        }
    }

    #[test]
    fn up_and_down_links_mirror() {
        let t = topo(4, 3);
        let up: Vec<_> = t.upward_links(37, 3).collect();
        let mut down: Vec<_> = t.downward_links(37, 3).collect();
        down.reverse();
        assert_eq!(up, down);
        assert_eq!(up[0], LinkId { level: 1, child: 37 });
        assert_eq!(up[1], LinkId { level: 2, child: 9 });
        assert_eq!(up[2], LinkId { level: 3, child: 2 });
        assert_eq!(t.ancestor(37, 2), SwitchId { level: 2, position: 2 });
    }
}
