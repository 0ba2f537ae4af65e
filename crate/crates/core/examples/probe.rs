use scde_core::de::DeOptions;
use scde_core::ensemble;
use scde_core::protograph::{EdgeMessages, Protograph};

fn main() {
    let base = ensemble::sc_ha_base(2, 4, 2, 1).unwrap();
    println!("{}", base.to_text());
    let graph = Protograph::new(&base);
    let mut msgs = EdgeMessages::all_ones(graph.n_edges());
    for iter in 1..=40 {
        msgs = graph.sweep(&msgs, 0.0);
        let max = msgs.max_message();
        if iter % 5 == 0 || max < 1e-9 {
            println!("iter {iter}: max = {max:.3e}");
        }
    }
    for e in 0..graph.n_edges() {
        if msgs.v2c[e].max(msgs.c2v[e]) > 1e-6 {
            let (row, col, mult) = graph.edge_info(e);
            println!(
                "stuck edge ({row},{col}) mult {mult}: v2c={:.3} c2v={:.3}",
                msgs.v2c[e], msgs.c2v[e]
            );
        }
    }
    let marg = graph.column_marginals(&msgs, 0.0);
    println!("max marginal = {:.3e}", marg.iter().cloned().fold(0.0f64, f64::max));
}
