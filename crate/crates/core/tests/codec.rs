//! Command encode and decode round trips.

mod common;

use common::{arb_command, arb_k_and_command};
use pimhash::isa::{self, CommandStream, Stage};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn single_command_round_trip((k, cmd) in arb_k_and_command()) {
        let bytes = isa::encode(&cmd, k).unwrap();
        prop_assert_eq!(bytes.len(), isa::encoded_len(cmd.opcode(), k));
        prop_assert_eq!(isa::decode(&bytes, k).unwrap(), (cmd, bytes.len()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn stream_file_round_trip(cmds in prop::collection::vec(arb_command(8), 0..64)) {
        let mut s = CommandStream::new();
        for c in &cmds {
            s.push(Stage::Theta, *c);
        }
        let file = s.to_file_bytes(8).unwrap();
        let (k, back) = isa::read_stream_file(&file).unwrap();
        prop_assert_eq!(k, 8);
        prop_assert_eq!(back, cmds);
    }
}
