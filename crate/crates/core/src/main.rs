use monostack::cli;

fn main() {
    let argv: Vec<String> = std::env::args().collect();
    let result = cli::run(&argv);
    if result.payload.is_null() {
        // help, version and argument errors
        if result.status == cli::EXIT_OK {
            print!("{}", result.summary);
        } else {
            eprint!("{}", result.summary);
        }
    } else {
        let pretty = cli::wants_pretty(&argv);
        let text = if pretty {
            serde_json::to_string_pretty(&result.payload)
        } else {
            serde_json::to_string(&result.payload)
        }
        .expect("JSON values serialize");
        println!("{text}");
        if pretty || result.status != cli::EXIT_OK {
            eprintln!("{}", result.summary);
        }
    }
    std::process::exit(result.status);
}
