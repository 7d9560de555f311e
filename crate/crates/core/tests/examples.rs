macro_rules! example {
    ($module:ident, $file:literal, $test:ident) => {
        mod $module {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", $file));
        }

        #[test]
        fn $test() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(relations, "relations.rs", relations_example_runs);
example!(policies, "policies.rs", policies_example_runs);
example!(responsibilities, "responsibilities.rs", responsibilities_example_runs);
example!(four_networks, "four_networks.rs", four_networks_example_runs);
example!(oracle_grid, "oracle_grid.rs", oracle_grid_example_runs);
example!(scenario_files, "scenario_files.rs", scenario_files_example_runs);
