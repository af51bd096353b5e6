use polarldpc::polar::construct_5g;
use polarldpc::tanner::{full_bipartite, prune, reduction_factor, girth_and_cycles};

fn main() {
    let code = construct_5g(128, 64).unwrap();
    let before = full_bipartite(&code);
    let pre = before.pre_freeze.unwrap();
    println!("pre-freeze: vns={} cns={} edges={}", pre.vns, pre.cns, pre.edges);
    println!("full_bipartite: vns={} cns={} edges={}", before.num_vns(), before.num_cns(), before.num_edges());
    let after = prune(&before);
    println!("pruned: vns={} cns={} edges={} punct={}", after.num_vns(), after.num_cns(), after.num_edges(), after.num_punctured());
    println!("reduction vs full_bipartite: {:.4}", reduction_factor(&before, &after));
    println!("reduction vs pre-freeze edges: {:.4}", 1.0 - after.num_edges() as f64 / pre.edges as f64);
    let stats = girth_and_cycles(&after, 6).unwrap();
    println!("girth={:?} cycles4={} cycles6={}", stats.girth, stats.cycle_counts[&4], stats.cycle_counts[&6]);
    println!("cn deg hist: {:?}", stats.cn_degree_histogram);
    println!("vn deg hist: {:?}", stats.vn_degree_histogram);
}
