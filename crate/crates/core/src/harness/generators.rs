//! Desk-scale synthetic datasets: a social network and a co-purchase network.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Edge, PropertyGraph, Vertex};

const FIRST_NAMES: [&str; 8] = ["Ana", "Bo", "Chen", "Dara", "Eli", "Fay", "Gus", "Hana"];
const LAST_NAMES: [&str; 6] = ["Ito", "Jones", "Kim", "Lund", "Moreau", "Novak"];
const GROUPS: [&str; 4] = ["Book", "Music", "DVD", "Video"];

pub const SOCIAL_TRIPLES: [(&str, &str, &str); 9] = [
    ("Person", "Knows", "Person"),
    ("Person", "Has", "Message"),
    ("Message", "Has", "Tag"),
    ("Person", "LocatedIn", "Location"),
    ("Organization", "LocatedIn", "Location"),
    ("Message", "LocatedIn", "Location"),
    ("Person", "InterestedIn", "Tag"),
    ("Person", "StudyAt", "Organization"),
    ("Person", "WorkAt", "Organization"),
];

/// Discrete power law on `[min, max]` by inverse transform, exponent 2.5.
fn power_law(rng: &mut ChaCha8Rng, min: usize, max: usize) -> usize {
    if max <= min {
        return min;
    }
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let x = (min.max(1) as f64) * u.powf(-1.0 / 1.5);
    (x.floor() as usize).clamp(min, max)
}

fn distinct(rng: &mut ChaCha8Rng, pool: usize, k: usize, exclude: Option<usize>) -> Vec<usize> {
    let avail = pool - usize::from(exclude.is_some_and(|x| x < pool));
    let k = k.min(avail);
    let mut out = BTreeSet::new();
    while out.len() < k {
        let x = rng.gen_range(0..pool);
        if Some(x) != exclude {
            out.insert(x);
        }
    }
    out.into_iter().collect()
}

struct Edges {
    list: Vec<Edge>,
}

impl Edges {
    fn push(&mut self, src: String, dst: String, label: &str) -> &mut Edge {
        let id = format!("e{}", self.list.len());
        self.list.push(Edge::new(id, src, dst, label));
        self.list.last_mut().expect("just pushed")
    }
}

/// A social network with persons, organizations, tags, locations and
/// messages. Organization `o{i}` is a university for even `i` and a company
/// otherwise. Degrees follow a seeded power law.
pub fn generate_social_graph(persons: usize, orgs: usize, tags: usize, seed: u64) -> PropertyGraph {
    let (persons, orgs, tags) = (persons.max(1), orgs.max(1), tags.max(1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let locations = ((persons as f64).sqrt().ceil() as usize).max(1);
    let mut vertices = Vec::new();
    let mut edges = Edges { list: Vec::new() };

    for i in 0..locations {
        vertices.push(Vertex::new(format!("l{i}"), "Location").with("name", format!("City{i}")));
    }
    for i in 0..tags {
        vertices.push(Vertex::new(format!("t{i}"), "Tag").with("name", format!("tag{i}")));
    }
    for i in 0..orgs {
        let category = if i % 2 == 0 { "university" } else { "company" };
        vertices.push(
            Vertex::new(format!("o{i}"), "Organization")
                .with("category", category)
                .with("name", format!("Org{i}")),
        );
        let l = rng.gen_range(0..locations);
        edges.push(format!("o{i}"), format!("l{l}"), "LocatedIn");
    }
    let universities: Vec<usize> = (0..orgs).filter(|i| i % 2 == 0).collect();
    let companies: Vec<usize> = (0..orgs).filter(|i| i % 2 == 1).collect();

    let mut messages = 0usize;
    for i in 0..persons {
        let p = format!("p{i}");
        let gender = if rng.gen_bool(0.5) { "male" } else { "female" };
        vertices.push(
            Vertex::new(p.clone(), "Person")
                .with("gender", gender)
                .with("firstName", *FIRST_NAMES.choose(&mut rng).expect("names"))
                .with("lastName", *LAST_NAMES.choose(&mut rng).expect("names"))
                .with("age", rng.gen_range(18..70i64)),
        );
        let l = rng.gen_range(0..locations);
        edges.push(p.clone(), format!("l{l}"), "LocatedIn");

        let friends = power_law(&mut rng, 1, persons.saturating_sub(1).min(40));
        for j in distinct(&mut rng, persons, friends, Some(i)) {
            let since = rng.gen_range(2000..2024i64);
            edges
                .push(p.clone(), format!("p{j}"), "Knows")
                .props
                .insert("since".into(), since.into());
        }
        let interests = power_law(&mut rng, 1, tags.min(10));
        for t in distinct(&mut rng, tags, interests, None) {
            edges.push(p.clone(), format!("t{t}"), "InterestedIn");
        }
        if !universities.is_empty() && rng.gen_bool(0.6) {
            let u = *universities.choose(&mut rng).expect("nonempty");
            let year = rng.gen_range(1990..2024i64);
            edges
                .push(p.clone(), format!("o{u}"), "StudyAt")
                .props
                .insert("classYear".into(), year.into());
        }
        if !companies.is_empty() && rng.gen_bool(0.7) {
            let c = *companies.choose(&mut rng).expect("nonempty");
            let from = rng.gen_range(1995..2024i64);
            edges
                .push(p.clone(), format!("o{c}"), "WorkAt")
                .props
                .insert("workFrom".into(), from.into());
        }
        let posts = power_law(&mut rng, 1, 12) - 1;
        for _ in 0..posts {
            let m = format!("m{messages}");
            messages += 1;
            vertices.push(Vertex::new(m.clone(), "Message").with("length", rng.gen_range(1..280i64)));
            edges.push(p.clone(), m.clone(), "Has");
            let l = rng.gen_range(0..locations);
            edges.push(m.clone(), format!("l{l}"), "LocatedIn");
            let k = power_law(&mut rng, 1, tags.min(4));
            for t in distinct(&mut rng, tags, k, None) {
                edges.push(m.clone(), format!("t{t}"), "Has");
            }
        }
    }
    PropertyGraph::new(vertices, edges.list).expect("generated graph is valid")
}

/// A product co-purchase network: `Product` vertices with title, group and
/// sales rank, and `CoPurchased` edges biased towards the same group.
pub fn generate_copurchase_graph(products: usize, seed: u64) -> PropertyGraph {
    let n = products.max(2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let groups: Vec<usize> = (0..n).map(|_| rng.gen_range(0..GROUPS.len())).collect();
    let vertices = (0..n)
        .map(|i| {
            Vertex::new(format!("p{i}"), "Product")
                .with("title", format!("Product {i}"))
                .with("group", GROUPS[groups[i]])
                .with("salesrank", rng.gen_range(1..100_000i64))
        })
        .collect();
    let mut edges = Edges { list: Vec::new() };
    for i in 0..n {
        let k = power_law(&mut rng, 1, (n - 1).min(20));
        let same: Vec<usize> = (0..n).filter(|&j| j != i && groups[j] == groups[i]).collect();
        let mut chosen = BTreeSet::new();
        while chosen.len() < k {
            let j = if !same.is_empty() && rng.gen_bool(0.7) {
                *same.choose(&mut rng).expect("nonempty")
            } else {
                let j = rng.gen_range(0..n);
                if j == i {
                    continue;
                }
                j
            };
            chosen.insert(j);
        }
        for j in chosen {
            edges.push(format!("p{i}"), format!("p{j}"), "CoPurchased");
        }
    }
    PropertyGraph::new(vertices, edges.list).expect("generated graph is valid")
}
